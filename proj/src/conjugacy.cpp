#include "rigidlab/conjugacy.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace rigidlab {

namespace {

int residual_nodes(int dim, const ConjugacyOptions& opt) {
    if (opt.residual_resolution > 0) return opt.residual_resolution;
    return dim == 1 ? 1024 : 64;
}

Vec grid_node(int dim, int n, std::size_t idx) {
    Vec x(dim);
    x[0] = static_cast<double>(idx % n) / n;
    if (dim == 2) x[1] = static_cast<double>(idx / n) / n;
    return x;
}

std::size_t grid_size(int dim, int n) {
    return dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

double grid_sup(int dim, int n, const std::function<double(const Vec&)>& fn) {
    const std::size_t sz = grid_size(dim, n);
    std::vector<double> vals(sz);
    parallel_for(sz, [&](std::size_t i) { vals[i] = fn(grid_node(dim, n, i)); });
    return *std::max_element(vals.begin(), vals.end());
}

/// Induced sup norm of the inverse of the linear part.
double inverse_norm(const Mat& Linv) {
    double m = 0.0;
    for (Eigen::Index r = 0; r < Linv.rows(); ++r) m = std::max(m, Linv.row(r).cwiseAbs().sum());
    return m;
}

}  // namespace

ConjugacyEvaluator::ConjugacyEvaluator(int dim, LiftFn lift, int n_terms)
    : dim_(dim), lift_(std::make_shared<const LiftFn>(std::move(lift))), n_terms_(n_terms) {}

ConjugacyEvaluator ConjugacyEvaluator::identity(int dim) {
    return ConjugacyEvaluator(dim, [](const Vec& x) { return x; }, 0);
}

nlohmann::json ConjugacyEvaluator::to_json() const {
    return {{"dim", dim_}, {"n_terms", n_terms_}, {"residual", residual_}, {"conj_tol", kConjTol}};
}

std::string ConjugacyEvaluator::snapshot_csv(int resolution) const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "# holder_data: conjugacy samples, not smooth\n";
    os << (dim_ == 1 ? "x,h" : "x,y,hx,hy") << "\n";
    const std::size_t sz = grid_size(dim_, resolution);
    for (std::size_t i = 0; i < sz; ++i) {
        Vec x = grid_node(dim_, resolution, i);
        Vec h = lift(x);
        os << x[0];
        if (dim_ == 2) os << ',' << x[1];
        for (Eigen::Index k = 0; k < h.size(); ++k) os << ',' << h[k];
        os << "\n";
    }
    return os.str();
}

ConjugacyEvaluator linearize(const ExpandingMap& f, const ConjugacyOptions& opt) {
    f.require_expanding();
    const int dim = f.dim();
    const Mat Linv = f.linear_part().cast<double>().inverse();
    const double q = inverse_norm(Linv);
    const double B = f.perturbation_bound();
    int n = 0;
    if (B > 0.0) {
        // tail bound B q^{n+1} / (1 - q)
        while (B * std::pow(q, n + 1) / (1.0 - q) >= opt.truncation_tol) ++n;
    }
    auto fn = [f, Linv, n](const Vec& x) -> Vec {
        if (n == 0) return x;
        std::vector<Vec> a(n);
        Vec y = wrap(x);
        for (int k = 0; k < n; ++k) {
            a[k] = f.perturbation(y);
            y = f.evaluate(y);
        }
        Vec acc = Vec::Zero(x.size());
        for (int k = n - 1; k >= 0; --k) acc = Linv * (a[k] + acc);
        return x + acc;
    };
    ConjugacyEvaluator h(dim, fn, n);
    h.set_residual(conjugation_residual_linear(h, f, residual_nodes(dim, opt)));
    return h;
}

ConjugacyEvaluator delinearize(const ExpandingMap& f, const ConjugacyOptions& opt) {
    f.require_expanding();
    const int dim = f.dim();
    const Mat Ld = f.linear_part().cast<double>();
    const Mat Linv = Ld.inverse();
    const double q = inverse_norm(Linv);
    const double B = f.perturbation_bound();
    int n = 0;
    if (B > 0.0) {
        const double start = B * q / (1.0 - q);
        const double contraction = 1.0 / f.expansion_certificate().bound;
        while (start * std::pow(contraction, n) >= opt.truncation_tol) ++n;
    }
    auto fn = [f, Ld, n](const Vec& x) -> Vec {
        if (n == 0) return x;
        const Vec base = x.array().floor().matrix();
        std::vector<Vec> m(n + 1);
        Vec p = x - base;
        for (int j = 0; j < n; ++j) {
            Vec lp = Ld * p;
            m[j + 1] = lp.array().floor().matrix();
            p = lp - m[j + 1];
        }
        Vec qv = p;
        for (int j = n - 1; j >= 0; --j) qv = f.inverse_lift(qv + m[j + 1]);
        return qv + base;
    };
    ConjugacyEvaluator k(dim, fn, n);
    const int res = residual_nodes(dim, opt);
    const IntMat L = f.linear_part();
    k.set_residual(grid_sup(dim, res, [&](const Vec& x) {
        return torus_distance(k.lift(L.cast<double>() * x), f.lift(k.lift(x)));
    }));
    return k;
}

ConjugacyEvaluator conjugacy_between(const ExpandingMap& f1, const ExpandingMap& f2, const ConjugacyOptions& opt) {
    if (f1.dim() != f2.dim() || f1.linear_part() != f2.linear_part())
        throw LinearPartMismatch("maps have different linear parts");
    const auto h1 = linearize(f1, opt);
    const bool f2_linear = f2.perturbation_bound() == 0.0;
    ConjugacyEvaluator result = [&] {
        if (f2_linear) return ConjugacyEvaluator(f1.dim(), [h1](const Vec& x) { return h1.lift(x); }, h1.n_terms());
        const auto k2 = delinearize(f2, opt);
        return ConjugacyEvaluator(f1.dim(), [h1, k2](const Vec& x) { return k2.lift(h1.lift(x)); },
                                  h1.n_terms() + k2.n_terms());
    }();
    result.set_residual(conjugation_residual(result, f1, f2, residual_nodes(f1.dim(), opt)));
    return result;
}

double conjugation_residual(const ConjugacyEvaluator& h, const ExpandingMap& f1, const ExpandingMap& f2,
                            int resolution) {
    return grid_sup(f1.dim(), resolution, [&](const Vec& x) {
        return torus_distance(h.lift(f1.evaluate(x)), f2.lift(h.lift(x)));
    });
}

double conjugation_residual_linear(const ConjugacyEvaluator& h, const ExpandingMap& f, int resolution) {
    const Mat L = f.linear_part().cast<double>();
    return grid_sup(f.dim(), resolution,
                    [&](const Vec& x) { return torus_distance(h.lift(f.evaluate(x)), L * h.lift(x)); });
}

double composition_residual(const ConjugacyEvaluator& k, const ConjugacyEvaluator& h, int resolution) {
    return grid_sup(k.dim(), resolution, [&](const Vec& x) { return torus_distance(k.lift(h.lift(x)), x); });
}

bool lift_is_increasing(const ConjugacyEvaluator& h, int resolution) {
    if (h.dim() != 1) throw PreconditionViolation("monotonicity is defined for circle conjugacies");
    std::vector<double> v(resolution + 1);
    parallel_for(v.size(), [&](std::size_t i) { v[i] = h.lift(vec1(static_cast<double>(i) / resolution))[0]; });
    for (int i = 0; i < resolution; ++i)
        if (!(v[i + 1] > v[i])) return false;
    return true;
}

double local_scaling_exponent(const CircleMap& g, int j_min, int j_max) {
    if (g.lift(0.0) != 0.0) throw PreconditionViolation("local exponent requires g(0) = 0");
    const auto f = ExpandingMap::circle(g);
    const auto h = linearize(f);
    const double d = std::abs(static_cast<double>(g.degree()));
    const double threshold = 0.05;
    std::vector<double> xs, ys;
    for (int j = j_min; j <= j_max; ++j) {
        const double x = std::ldexp(1.0, -j);
        double y = x;
        int m = 0;
        while (std::abs(y) < threshold) {
            y = g.lift(y);
            ++m;
        }
        const double hx = std::abs(h.lift(vec1(y))[0]) / std::pow(d, m);
        xs.push_back(std::log(x));
        ys.push_back(std::log(hx));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

FiberReport fiber_direction_estimate(const std::vector<GridFunction>& potentials, int dim, int resolution,
                                     double kernel_tol) {
    FiberReport r;
    r.dim = dim;
    r.kernel_tol = kernel_tol;
    r.empty_family = potentials.empty();
    if (!potentials.empty()) resolution = potentials.front().resolution();
    for (const auto& p : potentials)
        if (p.dim() != dim || p.resolution() != resolution)
            throw PreconditionViolation("potentials must share one grid");
    r.resolution = resolution;
    const std::size_t sz = grid_size(dim, resolution);
    r.dimensions.assign(sz, dim);
    r.bases.assign(sz, {});
    parallel_for(sz, [&](std::size_t i) {
        const Vec x = grid_node(dim, resolution, i);
        std::vector<Vec> basis;
        if (potentials.empty()) {
            for (int c = 0; c < dim; ++c) basis.push_back(Vec::Unit(dim, c));
        } else {
            Eigen::MatrixXd G(static_cast<Eigen::Index>(std::max<std::size_t>(potentials.size(), dim)), dim);
            G.setZero();
            for (std::size_t k = 0; k < potentials.size(); ++k) G.row(k) = potentials[k].gradient(x).transpose();
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
            const auto s = svd.singularValues();
            const double smax = s.maxCoeff();
            for (int c = 0; c < dim; ++c)
                if (smax == 0.0 || s[c] < kernel_tol * smax) {
                    Vec v = svd.matrixV().col(c);
                    // fix the sign: first nonzero coordinate positive
                    for (int t = 0; t < dim; ++t)
                        if (std::abs(v[t]) > 1e-12) {
                            if (v[t] < 0) v = -v;
                            break;
                        }
                    basis.push_back(v);
                }
        }
        r.dimensions[i] = static_cast<int>(basis.size());
        r.bases[i] = std::move(basis);
    });
    r.min_dimension = *std::min_element(r.dimensions.begin(), r.dimensions.end());
    return r;
}

double FiberReport::fraction_spanned_by(const Vec& direction, double angle_tol) const {
    const Vec d = direction.normalized();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < bases.size(); ++i)
        if (bases[i].size() == 1 && 1.0 - std::abs(bases[i][0].dot(d)) < angle_tol) ++hits;
    return static_cast<double>(hits) / static_cast<double>(bases.size());
}

nlohmann::json FiberReport::to_json(bool per_node) const {
    nlohmann::json j;
    j["dim"] = dim;
    j["resolution"] = resolution;
    j["m"] = min_dimension;
    j["kernel_tol"] = kernel_tol;
    j["empty_family"] = empty_family;
    j["upper_bound_note"] = "kernel of the supplied family only; an upper bound on the true distribution";
    std::vector<long long> hist(dim + 1, 0);
    for (int d : dimensions) ++hist[d];
    j["dimension_histogram"] = hist;
    if (per_node) {
        j["dimensions"] = dimensions;
        nlohmann::json b = nlohmann::json::array();
        for (const auto& nb : bases) {
            nlohmann::json node = nlohmann::json::array();
            for (const auto& v : nb) node.push_back(std::vector<double>(v.data(), v.data() + v.size()));
            b.push_back(node);
        }
        j["basis"] = b;
    }
    return j;
}

std::string FiberReport::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << (dim == 1 ? "x,kernel_dim\n" : "x,y,kernel_dim\n");
    for (std::size_t i = 0; i < dimensions.size(); ++i) {
        Vec x = grid_node(dim, resolution, i);
        os << x[0] << ',';
        if (dim == 2) os << x[1] << ',';
        os << dimensions[i] << "\n";
    }
    return os.str();
}

}  // namespace rigidlab
