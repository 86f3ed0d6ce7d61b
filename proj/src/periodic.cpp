#include "rigidlab/periodic.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace rigidlab {

std::string PeriodicOrbit::code_string() const {
    std::string s;
    for (std::size_t i = 0; i < code.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(code[i]);
    }
    return s;
}

long long PointIndex::cell(double x) const {
    const long long m = std::min<long long>(1LL << 20, static_cast<long long>(1.0 / tol_));
    long long c = static_cast<long long>(std::floor(wrap01(x) * static_cast<double>(m)));
    return std::clamp(c, 0LL, m - 1);
}

void PointIndex::insert(const Vec& p, std::size_t id) {
    long long key = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) key = key * (1LL << 21) + cell(p[i]);
    cells_.emplace(key, points_.size());
    points_.emplace_back(p, id);
}

long long PointIndex::find(const Vec& p) const {
    double dist;
    long long id = find_nearest(p, &dist);
    return (id >= 0 && dist < tol_) ? id : -1;
}

long long PointIndex::find_nearest(const Vec& p, double* dist) const {
    const long long m = std::min<long long>(1LL << 20, static_cast<long long>(1.0 / tol_));
    const int dim = static_cast<int>(p.size());
    long long best = -1;
    std::size_t best_slot = 0;
    double best_d = std::numeric_limits<double>::infinity();
    long long base[2] = {cell(p[0]), dim > 1 ? cell(p[1]) : 0};
    const int span1 = dim > 1 ? 1 : 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -span1; b <= span1; ++b) {
            long long c0 = ((base[0] + a) % m + m) % m;
            long long key = c0;
            if (dim > 1) key = c0 * (1LL << 21) + ((base[1] + b) % m + m) % m;
            auto range = cells_.equal_range(key);
            for (auto it = range.first; it != range.second; ++it) {
                const double d = torus_distance(points_[it->second].first, p);
                // ties resolved by insertion order for determinism
                if (d < best_d || (d == best_d && it->second < best_slot)) {
                    best_d = d;
                    best_slot = it->second;
                    best = static_cast<long long>(points_[it->second].second);
                }
            }
        }
    if (dist) *dist = best_d;
    return best;
}

namespace {

struct Candidate {
    std::vector<Vec> chain;  // chain[i] = orbit point i (unwrapped), i = 0..n-1
    std::vector<int> word;
};

/// Fixed point of z -> G(k_{w_0} + G(k_{w_1} + ... G(k_{w_{n-1}} + z))) + shift on the cover.
Candidate solve_word(const ExpandingMap& f, const std::vector<int>& word, const Vec& shift) {
    const int n = static_cast<int>(word.size());
    const int dim = f.dim();
    const auto& tr = f.branch_translates();
    auto contract = [&](const Vec& z, Mat* jac) {
        Vec y = z;
        Mat J = Mat::Identity(dim, dim);
        for (int i = n - 1; i >= 0; --i) {
            y = f.inverse_lift(y + tr[word[i]].cast<double>());
            if (jac) J = f.differential(y).inverse() * J;
        }
        if (jac) *jac = J;
        return y;
    };
    Vec z = contract(Vec::Zero(dim), nullptr) + shift;
    bool converged = false;
    for (int it = 0; it < kNewtonCap; ++it) {
        Mat J;
        Vec y = contract(z, &J) + shift;
        Vec step = (Mat::Identity(dim, dim) - J).inverse() * (y - z);
        z += step;
        if (step.cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, z.cwiseAbs().maxCoeff())) {
            converged = true;
            break;
        }
    }
    Candidate c;
    c.word = word;
    c.chain.resize(n);
    Vec y = z;
    for (int i = n - 1; i >= 0; --i) {
        y = f.inverse_lift(y + tr[word[i]].cast<double>());
        c.chain[i] = y;
    }
    const double res = (y + shift - z).cwiseAbs().maxCoeff();
    if (!converged && !(res < kNewtonTol))
        throw NewtonDivergence("periodic point for branch word failed to converge (residual " +
                               std::to_string(res) + ")");
    return c;
}

PeriodicOrbit make_orbit(const ExpandingMap& f, const Candidate& c, int period) {
    PeriodicOrbit o;
    o.period = period;
    const int dim = f.dim();
    o.orbit_differential = Mat::Identity(dim, dim);
    for (int i = 0; i < period; ++i) {
        Vec p = wrap(c.chain[i]);
        o.points.push_back(p);
        o.code.push_back(c.word[i]);
        o.orbit_differential = f.differential(p) * o.orbit_differential;
        o.log_jacobian += f.log_abs_jacobian(p);
    }
    o.base_point = o.points[0];
    return o;
}

long long checked_power(long long base, int n, long long cap) {
    long long r = 1;
    for (int i = 0; i < n; ++i) {
        if (r > cap / base) throw EnumerationCapExceeded(std::to_string(base) + "^" + std::to_string(n) +
                                                         " branch words exceed the cap " +
                                                         std::to_string(cap));
        r *= base;
    }
    return r;
}

}  // namespace

long long fixed_point_count_of_linear_part(const IntMat& L, int n) {
    if (L.rows() == 1) {
        __int128 p = 1;
        for (int i = 0; i < n; ++i) p *= L(0, 0);
        p -= 1;
        return static_cast<long long>(p < 0 ? -p : p);
    }
    __int128 a = 1, b = 0, c = 0, d = 1;
    for (int i = 0; i < n; ++i) {
        __int128 na = a * L(0, 0) + b * L(1, 0), nb = a * L(0, 1) + b * L(1, 1);
        __int128 nc = c * L(0, 0) + d * L(1, 0), nd = c * L(0, 1) + d * L(1, 1);
        a = na; b = nb; c = nc; d = nd;
    }
    __int128 det = (a - 1) * (d - 1) - b * c;
    return static_cast<long long>(det < 0 ? -det : det);
}

std::vector<PeriodicOrbit> fixed_points_of_iterate(const ExpandingMap& f, int n, long long cap) {
    if (n < 1) throw PreconditionViolation("period must be >= 1");
    f.require_expanding();
    const long long deg = f.degree();
    const long long words = checked_power(deg, n, cap);
    const long long expected = fixed_point_count_of_linear_part(f.linear_part(), n);
    const int dim = f.dim();

    // Words alone reach every fixed point when det(L^n - I) <= det(L^n); otherwise
    // (negative eigenvalues) unit shifts of the contraction supply the rest.
    std::vector<Vec> shifts{Vec::Zero(dim)};
    if (dim == 1) {
        shifts.push_back(vec1(-1.0));
        shifts.push_back(vec1(1.0));
    } else {
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                if (a != 0 || b != 0) shifts.push_back(vec2(a, b));
    }

    std::vector<PeriodicOrbit> out;
    PointIndex index(kDedupTol);
    long long found = 0;
    for (const auto& shift : shifts) {
        if (found >= expected) break;
        std::vector<Candidate> cands(static_cast<std::size_t>(words));
        parallel_for(cands.size(), [&](std::size_t idx) {
            std::vector<int> word(n);
            long long r = static_cast<long long>(idx);
            for (int i = n - 1; i >= 0; --i) {
                word[i] = static_cast<int>(r % deg);
                r /= deg;
            }
            cands[idx] = solve_word(f, word, shift);
        });
        for (const auto& c : cands) {
            const Vec p0 = wrap(c.chain[0]);
            if (index.find(p0) >= 0) continue;
            int period = n;
            for (int p = 1; p < n; ++p)
                if (n % p == 0 && torus_distance(wrap(c.chain[p]), p0) < kDedupTol) {
                    period = p;
                    break;
                }
            PeriodicOrbit o = make_orbit(f, c, period);
            for (const auto& q : o.points) index.insert(q, out.size());
            found += period;
            out.push_back(std::move(o));
        }
    }
    if (found != expected)
        throw NoConvergence("found " + std::to_string(found) + " fixed points of f^" + std::to_string(n) +
                            ", expected " + std::to_string(expected));
    return out;
}

std::vector<PeriodicOrbit> orbits_up_to(const ExpandingMap& f, int n_max, long long cap) {
    std::vector<PeriodicOrbit> out;
    for (int n = 1; n <= n_max; ++n)
        for (auto& o : fixed_points_of_iterate(f, n, cap))
            if (o.period == n) out.push_back(std::move(o));
    return out;
}

long long fixed_point_count(const std::vector<PeriodicOrbit>& orbits) {
    long long s = 0;
    for (const auto& o : orbits) s += o.period;
    return s;
}

double birkhoff_sum(const PeriodicOrbit& orbit, const ScalarField& phi) {
    double s = 0.0;
    for (const auto& p : orbit.points) s += phi(p);
    return s;
}

std::vector<std::complex<double>> eigenvalues(const Mat& m) {
    if (m.rows() == 1) return {std::complex<double>(m(0, 0), 0.0)};
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = 0.25 * tr * tr - det;
    if (disc >= 0) {
        const double big = 0.5 * tr + std::copysign(std::sqrt(disc), tr);
        const double small = big != 0.0 ? det / big : 0.0;
        return {std::complex<double>(small, 0.0), std::complex<double>(big, 0.0)};
    }
    const double im = std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, -im), std::complex<double>(0.5 * tr, im)};
}

std::vector<double> lyapunov_exponents(const PeriodicOrbit& orbit) {
    std::vector<double> out;
    for (const auto& e : eigenvalues(orbit.orbit_differential))
        out.push_back(std::log(std::abs(e)) / orbit.period);
    std::sort(out.begin(), out.end());
    return out;
}

std::string orbits_to_csv(const std::vector<PeriodicOrbit>& orbits) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "period,code,points,log_jacobian,exponents\n";
    for (const auto& o : orbits) {
        os << o.period << ',' << o.code_string() << ",\"";
        for (std::size_t i = 0; i < o.points.size(); ++i) {
            if (i) os << ';';
            for (Eigen::Index k = 0; k < o.points[i].size(); ++k) os << (k ? " " : "") << o.points[i][k];
        }
        os << "\"," << o.log_jacobian << ",\"";
        auto ex = lyapunov_exponents(o);
        for (std::size_t i = 0; i < ex.size(); ++i) os << (i ? ";" : "") << ex[i];
        os << "\"\n";
    }
    return os.str();
}

}  // namespace rigidlab
