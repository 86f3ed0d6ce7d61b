#include "rigidlab/transfer.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rigidlab {

TransferPlan::TransferPlan(const ExpandingMap& f, int resolution)
    : dim_(f.dim()), n_(resolution), branches_(static_cast<std::size_t>(f.degree())) {
    f.require_expanding();
    if (resolution < 16 || !is_power_of_two(resolution))
        throw PreconditionViolation("grid resolution must be a power of two >= 16");
    nodes_ = dim_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
    pre_.resize(nodes_ * branches_);
    stencils_.resize(nodes_ * branches_ * 2);
    const GridFunction probe = GridFunction::constant(dim_, n_, 0.0);
    parallel_for(nodes_, [&](std::size_t i) {
        const auto ys = f.inverse_branches(probe.node(i));
        for (std::size_t b = 0; b < branches_; ++b) {
            pre_[i * branches_ + b] = ys[b];
            auto* st = &stencils_[(i * branches_ + b) * 2];
            st[0] = probe.stencil(ys[b][0]);
            if (dim_ == 2) st[1] = probe.stencil(ys[b][1]);
        }
    });
}

std::vector<double> TransferPlan::at_preimages(const GridFunction& g) const {
    if (g.dim() != dim_ || g.resolution() != n_) throw PreconditionViolation("grid does not match plan");
    std::vector<double> out(nodes_ * branches_);
    parallel_for(nodes_, [&](std::size_t i) {
        for (std::size_t b = 0; b < branches_; ++b) out[i * branches_ + b] = g.evaluate(stencil(i, b));
    });
    return out;
}

GridFunction apply_transfer(const TransferPlan& plan, const GridFunction& phi, const GridFunction& v) {
    const auto ph = plan.at_preimages(phi);
    const auto vv = plan.at_preimages(v);
    const std::size_t B = plan.branches();
    std::vector<double> out(plan.nodes());
    parallel_for(plan.nodes(), [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t b = 0; b < B; ++b) s += std::exp(ph[i * B + b]) * vv[i * B + b];
        out[i] = s;
    });
    return GridFunction(plan.dim(), plan.resolution(), std::move(out));
}

GridFunction apply_transfer(const ExpandingMap& f, const GridFunction& phi, const GridFunction& v) {
    return apply_transfer(TransferPlan(f, phi.resolution()), phi, v);
}

EigenData leading_eigendata(const TransferPlan& plan, const GridFunction& phi, const EigenOptions& opt) {
    const std::size_t B = plan.branches(), N = plan.nodes();
    const auto ph = plan.at_preimages(phi);
    GridFunction u = opt.initial_u ? *opt.initial_u : GridFunction::constant(plan.dim(), plan.resolution(), 0.0);
    if (opt.initial_u) {
        const double m = u.max_value();
        std::vector<double> v = u.values();
        for (auto& x : v) x -= m;
        u = GridFunction(plan.dim(), plan.resolution(), std::move(v));
    }
    std::vector<double> w(N);
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const auto uu = plan.at_preimages(u);
        parallel_for(N, [&](std::size_t i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < B; ++b) mx = std::max(mx, ph[i * B + b] + uu[i * B + b]);
            double s = 0.0;
            for (std::size_t b = 0; b < B; ++b) s += std::exp(ph[i * B + b] + uu[i * B + b] - mx);
            w[i] = mx + std::log(s);
        });
        const double c = *std::max_element(w.begin(), w.end());
        double diff = 0.0, residual = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            diff = std::max(diff, std::abs(w[i] - c - u.value(i)));
            residual = std::max(residual, std::abs(std::exp(w[i]) - std::exp(c + u.value(i))));
        }
        if (diff < 0.1 * opt.eig_tol && residual < opt.eig_tol) {
            EigenData e;
            e.c = c;
            e.u = u;
            e.residual = residual;
            e.iterations = it;
            e.eig_tol = opt.eig_tol;
            return e;
        }
        std::vector<double> next(N);
        for (std::size_t i = 0; i < N; ++i) next[i] = w[i] - c;
        u = GridFunction(plan.dim(), plan.resolution(), std::move(next));
    }
    throw NoConvergence("power iteration did not reach eig_tol " + std::to_string(opt.eig_tol) + " in " +
                        std::to_string(opt.max_iterations) + " iterations");
}

EigenData leading_eigendata(const ExpandingMap& f, const GridFunction& phi, const EigenOptions& opt) {
    return leading_eigendata(TransferPlan(f, phi.resolution()), phi, opt);
}

double normalization_residual(const TransferPlan& plan, const GridFunction& phi_hat) {
    const auto one = GridFunction::constant(plan.dim(), plan.resolution(), 1.0);
    const auto l1 = apply_transfer(plan, phi_hat, one);
    double r = 0.0;
    for (double v : l1.values()) r = std::max(r, std::abs(v - 1.0));
    return r;
}

NormalizedPotential normalize_potential(const ExpandingMap& f, const TransferPlan& plan,
                                        const GridFunction& phi, const EigenOptions& opt) {
    EigenData e = leading_eigendata(plan, phi, opt);
    const std::size_t N = plan.nodes();
    std::vector<double> ph(N);
    parallel_for(N, [&](std::size_t i) {
        const Vec x = phi.node(i);
        ph[i] = phi.value(i) - e.c + e.u.value(i) - e.u(f.evaluate(x));
    });
    NormalizedPotential np;
    np.phi_hat = GridFunction(plan.dim(), plan.resolution(), std::move(ph));
    np.c = e.c;
    np.u = e.u;
    np.eigen_residual = e.residual;
    np.eig_tol = opt.eig_tol;
    np.normalization_residual = normalization_residual(plan, np.phi_hat);
    return np;
}

NormalizedPotential normalize_potential(const ExpandingMap& f, const GridFunction& phi, const EigenOptions& opt) {
    return normalize_potential(f, TransferPlan(f, phi.resolution()), phi, opt);
}

double pressure_via_periodic_orbits(const ExpandingMap& f, const ScalarField& phi, int n, long long cap) {
    const auto orbits = fixed_points_of_iterate(f, n, cap);
    std::vector<double> terms;
    for (const auto& o : orbits) {
        const double s = birkhoff_sum(o, phi) * (n / o.period);
        for (int k = 0; k < o.period; ++k) terms.push_back(s);
    }
    const double mx = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - mx);
    return (mx + std::log(acc)) / n;
}

nlohmann::json EigenData::to_json(bool include_values) const {
    nlohmann::json j;
    j["c"] = c;
    j["residual"] = residual;
    j["eig_tol"] = eig_tol;
    j["iterations"] = iterations;
    if (include_values) j["u"] = u.to_json();
    return j;
}

nlohmann::json NormalizedPotential::to_json(bool include_values) const {
    nlohmann::json j;
    j["c"] = c;
    j["eigen_residual"] = eigen_residual;
    j["normalization_residual"] = normalization_residual;
    j["eig_tol"] = eig_tol;
    if (include_values) {
        j["phi_hat"] = phi_hat.to_json();
        j["u"] = u.to_json();
    }
    return j;
}

}  // namespace rigidlab
