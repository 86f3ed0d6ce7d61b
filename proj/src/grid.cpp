#include "rigidlab/grid.hpp"

#include "rigidlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace rigidlab {

bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

void solve_periodic_spline(double* v, int n, std::ptrdiff_t stride) {
    // Cyclic tridiagonal with a = c = 1/6, b = 4/6 via Sherman-Morrison.
    const double a = 1.0 / 6.0, b = 4.0 / 6.0, c = 1.0 / 6.0;
    const double gamma = -b;
    std::vector<double> cp(n), x(n), z(n), u(n, 0.0);
    auto solve = [&](const std::vector<double>& rhs, std::vector<double>& out) {
        std::vector<double> dp(n);
        double bb = b - gamma;
        cp[0] = c / bb;
        dp[0] = rhs[0] / bb;
        for (int i = 1; i < n; ++i) {
            double bi = (i == n - 1) ? b - a * c / gamma : b;
            double m = bi - a * cp[i - 1];
            cp[i] = c / m;
            dp[i] = (rhs[i] - a * dp[i - 1]) / m;
        }
        out[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) out[i] = dp[i] - cp[i] * out[i + 1];
    };
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = v[i * stride];
    solve(rhs, x);
    u[0] = gamma;
    u[n - 1] = a;
    solve(u, z);
    const double fact = (x[0] + c * x[n - 1] / gamma) / (1.0 + z[0] + c * z[n - 1] / gamma);
    for (int i = 0; i < n; ++i) v[i * stride] = x[i] - fact * z[i];
}

GridFunction::GridFunction(int dim, int resolution, std::vector<double> values)
    : dim_(dim), n_(resolution), values_(std::move(values)) {
    if (dim != 1 && dim != 2) throw PreconditionViolation("grid dimension must be 1 or 2");
    if (resolution < 16 || !is_power_of_two(resolution))
        throw PreconditionViolation("grid resolution must be a power of two >= 16");
    std::size_t expect = dim == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
    if (values_.size() != expect) throw PreconditionViolation("grid value count mismatch");
    for (double v : values_)
        if (!std::isfinite(v)) throw PreconditionViolation("grid values must be finite");
    fit();
}

GridFunction GridFunction::constant(int dim, int resolution, double value) {
    std::size_t sz = dim == 1 ? static_cast<std::size_t>(resolution)
                              : static_cast<std::size_t>(resolution) * resolution;
    return GridFunction(dim, resolution, std::vector<double>(sz, value));
}

GridFunction GridFunction::sample(int dim, int resolution, const std::function<double(const Vec&)>& fn) {
    std::size_t sz = dim == 1 ? static_cast<std::size_t>(resolution)
                              : static_cast<std::size_t>(resolution) * resolution;
    std::vector<double> v(sz);
    for (std::size_t i = 0; i < sz; ++i) {
        Vec x(dim);
        x[0] = static_cast<double>(i % resolution) / resolution;
        if (dim == 2) x[1] = static_cast<double>(i / resolution) / resolution;
        v[i] = fn(x);
    }
    return GridFunction(dim, resolution, std::move(v));
}

Vec GridFunction::node(std::size_t idx) const {
    Vec x(dim_);
    x[0] = static_cast<double>(idx % n_) / n_;
    if (dim_ == 2) x[1] = static_cast<double>(idx / n_) / n_;
    return x;
}

void GridFunction::fit() {
    coeffs_ = values_;
    if (dim_ == 1) {
        solve_periodic_spline(coeffs_.data(), n_, 1);
    } else {
        for (int j = 0; j < n_; ++j) solve_periodic_spline(coeffs_.data() + static_cast<std::ptrdiff_t>(j) * n_, n_, 1);
        for (int i = 0; i < n_; ++i) solve_periodic_spline(coeffs_.data() + i, n_, n_);
    }
}

GridFunction::Stencil GridFunction::stencil(double x) const {
    Stencil s;
    double t = wrap01(x) * n_;
    double fl = std::floor(t);
    int i = static_cast<int>(fl);
    double u = t - fl;
    if (i >= n_) { i -= n_; }
    if (u == 0.0) s.node = i;
    const double u2 = u * u, u3 = u2 * u, om = 1.0 - u;
    s.w = {om * om * om / 6.0, (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0, (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0,
           u3 / 6.0};
    for (int m = 0; m < 4; ++m) s.idx[m] = ((i + m - 1) % n_ + n_) % n_;
    return s;
}

double GridFunction::evaluate(const Stencil* s) const {
    if (dim_ == 1) {
        if (s[0].node >= 0) return values_[s[0].node];
        double r = 0.0;
        for (int m = 0; m < 4; ++m) r += s[0].w[m] * coeffs_[s[0].idx[m]];
        return r;
    }
    if (s[0].node >= 0 && s[1].node >= 0)
        return values_[static_cast<std::size_t>(s[0].node) + static_cast<std::size_t>(n_) * s[1].node];
    double r = 0.0;
    for (int b = 0; b < 4; ++b) {
        const double* row = coeffs_.data() + static_cast<std::ptrdiff_t>(s[1].idx[b]) * n_;
        double rr = 0.0;
        for (int a = 0; a < 4; ++a) rr += s[0].w[a] * row[s[0].idx[a]];
        r += s[1].w[b] * rr;
    }
    return r;
}

double GridFunction::operator()(const Vec& x) const {
    Stencil s[2];
    s[0] = stencil(x[0]);
    if (dim_ == 2) s[1] = stencil(x[1]);
    return evaluate(s);
}

Vec GridFunction::gradient(const Vec& x) const {
    auto dweights = [&](double xx, std::array<int, 4>& idx, std::array<double, 4>& w,
                        std::array<double, 4>& dw) {
        double t = wrap01(xx) * n_;
        double fl = std::floor(t);
        int i = static_cast<int>(fl) % n_;
        double u = t - fl;
        const double u2 = u * u, u3 = u2 * u, om = 1.0 - u;
        w = {om * om * om / 6.0, (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0, (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0,
             u3 / 6.0};
        const double s = static_cast<double>(n_);
        dw = {-0.5 * om * om * s, (1.5 * u2 - 2.0 * u) * s, (-1.5 * u2 + u + 0.5) * s, 0.5 * u2 * s};
        for (int m = 0; m < 4; ++m) idx[m] = ((i + m - 1) % n_ + n_) % n_;
    };
    std::array<int, 4> ix, iy;
    std::array<double, 4> wx, dwx, wy, dwy;
    dweights(x[0], ix, wx, dwx);
    Vec g = Vec::Zero(dim_);
    if (dim_ == 1) {
        for (int m = 0; m < 4; ++m) g[0] += dwx[m] * coeffs_[ix[m]];
        return g;
    }
    dweights(x[1], iy, wy, dwy);
    for (int b = 0; b < 4; ++b) {
        const double* row = coeffs_.data() + static_cast<std::ptrdiff_t>(iy[b]) * n_;
        double r = 0.0, dr = 0.0;
        for (int a = 0; a < 4; ++a) {
            r += wx[a] * row[ix[a]];
            dr += dwx[a] * row[ix[a]];
        }
        g[0] += wy[b] * dr;
        g[1] += dwy[b] * r;
    }
    return g;
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

nlohmann::json GridFunction::to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    j["resolution"] = n_;
    j["values"] = values_;
    return j;
}

std::string GridFunction::to_csv(const std::string& column) const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << (dim_ == 1 ? "x," : "x,y,") << column << "\n";
    for (std::size_t i = 0; i < values_.size(); ++i) {
        Vec p = node(i);
        os << p[0] << ',';
        if (dim_ == 2) os << p[1] << ',';
        os << values_[i] << "\n";
    }
    return os.str();
}

}  // namespace rigidlab
