#include "rigidlab/cohomology.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace rigidlab {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::equivalent: return "equivalent";
        case Verdict::not_equivalent: return "not-equivalent";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "";
}

namespace {
std::vector<double> as_vector(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
}  // namespace

nlohmann::json EquivalenceReport::to_json(bool per_orbit) const {
    nlohmann::json j;
    j["max_period_checked"] = max_period_checked;
    j["max_discrepancy"] = max_discrepancy;
    j["verdict"] = to_string(verdict);
    j["first_mismatch_period"] = first_mismatch_period;
    j["match_tol_per_period"] = match_tol;
    j["orbit_count"] = orbits.size();
    if (per_orbit) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& o : orbits)
            rows.push_back({{"period", o.period},
                            {"code", o.code},
                            {"point1", as_vector(o.point1)},
                            {"point2", as_vector(o.point2)},
                            {"sum1", o.sum1},
                            {"sum2", o.sum2},
                            {"discrepancy", o.discrepancy}});
        j["orbits"] = rows;
    }
    return j;
}

EquivalenceReport check_equivalence(const ExpandingMap& f1, const ScalarField& phi1, const ExpandingMap& f2,
                                    const ScalarField& phi2, const ConjugacyEvaluator& h, int n_max,
                                    const EquivalenceOptions& opt) {
    if (f1.dim() != f2.dim()) throw LinearPartMismatch("maps act on different tori");
    if (opt.verify_conjugacy) {
        const double r = conjugation_residual(h, f1, f2, f1.dim() == 1 ? 256 : 32);
        if (!(r < 10 * kConjTol))
            throw PreconditionViolation("conjugacy residual " + std::to_string(r) + " exceeds tolerance");
    }
    const auto o1 = orbits_up_to(f1, n_max, opt.cap);
    const auto o2 = orbits_up_to(f2, n_max, opt.cap);
    PointIndex index(opt.pairing_tol);
    for (std::size_t i = 0; i < o2.size(); ++i)
        for (const auto& p : o2[i].points) index.insert(p, i);

    EquivalenceReport rep;
    rep.max_period_checked = n_max;
    rep.match_tol = opt.match_tol;
    rep.orbits.resize(o1.size());
    std::vector<std::string> failures(o1.size());
    parallel_for(o1.size(), [&](std::size_t i) {
        const auto& a = o1[i];
        const Vec y = h(a.base_point);
        double dist = 0.0;
        const long long j = index.find_nearest(y, &dist);
        if (j < 0 || !(dist < opt.pairing_tol) || o2[j].period != a.period) {
            failures[i] = "no f2-periodic point of period " + std::to_string(a.period) + " near h(" +
                          a.code_string() + ")";
            return;
        }
        OrbitComparison c;
        c.period = a.period;
        c.code = a.code_string();
        c.point1 = a.base_point;
        c.point2 = y;
        c.sum1 = birkhoff_sum(a, phi1);
        c.sum2 = birkhoff_sum(o2[j], phi2);
        c.discrepancy = std::abs(c.sum1 - c.sum2);
        rep.orbits[i] = c;
    });
    for (const auto& f : failures)
        if (!f.empty()) throw OrbitPairingFailure(f);
    for (const auto& c : rep.orbits) {
        rep.max_discrepancy = std::max(rep.max_discrepancy, c.discrepancy);
        if (c.discrepancy > opt.match_tol * c.period && rep.first_mismatch_period == 0)
            rep.first_mismatch_period = c.period;
    }
    if (rep.orbits.empty()) rep.verdict = Verdict::inconclusive;
    else rep.verdict = rep.first_mismatch_period ? Verdict::not_equivalent : Verdict::equivalent;
    return rep;
}

EquivalenceReport periodic_obstruction(const ExpandingMap& f, const ScalarField& psi, int n_max,
                                       const EquivalenceOptions& opt) {
    EquivalenceOptions o = opt;
    o.verify_conjugacy = false;
    return check_equivalence(f, psi, f, [](const Vec&) { return 0.0; }, ConjugacyEvaluator::identity(f.dim()),
                             n_max, o);
}

CohomologySolution solve_cohomological_equation(const ExpandingMap& f, const ScalarField& psi,
                                                const CohomologyOptions& opt) {
    const int dim = f.dim();
    const int N = opt.resolution > 0 ? opt.resolution : (dim == 1 ? 2048 : 128);
    EquivalenceOptions eo;
    eo.match_tol = opt.precondition_tol;
    const auto pre = periodic_obstruction(f, psi, opt.precondition_period, eo);
    if (pre.verdict == Verdict::not_equivalent)
        throw SeriesStall("periodic sum of psi is nonzero at period " + std::to_string(pre.first_mismatch_period) +
                          " (discrepancy " + std::to_string(pre.max_discrepancy) + ")");

    const TransferPlan plan(f, N);
    const auto np = normalize_potential(f, plan, GridFunction::constant(dim, N, 0.0));
    const auto weights_log = plan.at_preimages(np.phi_hat);
    const std::size_t B = plan.branches(), M = plan.nodes();
    std::vector<double> w(weights_log.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(weights_log[i]);

    // v_1 = L psi uses exact values of psi at the preimages; later iterates are splines.
    std::vector<std::vector<double>> iterates;
    std::vector<double> v(M);
    parallel_for(M, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t b = 0; b < B; ++b) s += w[i * B + b] * psi(plan.preimage(i, b));
        v[i] = s;
    });
    iterates.push_back(v);
    const double stop = opt.coh_tol / 10.0;
    double mean = 0.0;
    bool settled = false;
    for (int k = 1; k < opt.max_terms; ++k) {
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        if (*mx - *mn < 1e-3 * stop + 1e-9 * std::abs(*mx)) {
            double s = 0.0;
            for (double x : v) s += x;
            mean = s / static_cast<double>(M);
            settled = true;
            break;
        }
        const GridFunction g(dim, N, v);
        const auto gv = plan.at_preimages(g);
        std::vector<double> next(M);
        parallel_for(M, [&](std::size_t i) {
            double s = 0.0;
            for (std::size_t b = 0; b < B; ++b) s += w[i * B + b] * gv[i * B + b];
            next[i] = s;
        });
        v = std::move(next);
        iterates.push_back(v);
    }
    if (!settled) throw SeriesStall("transfer iterates of psi did not settle to a constant");

    std::vector<double> u(M, 0.0);
    int terms = 0;
    for (const auto& it : iterates) {
        double inc = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            u[i] += it[i] - mean;
            inc = std::max(inc, std::abs(it[i] - mean));
        }
        ++terms;
        if (inc < 1e-3 * stop) break;
    }
    const auto fixed = fixed_points_of_iterate(f, 1);
    const Vec x0 = fixed.front().base_point;
    const GridFunction raw(dim, N, u);
    const double pin = raw(x0);
    for (auto& x : u) x -= pin;

    CohomologySolution sol;
    sol.u = GridFunction(dim, N, std::move(u));
    sol.marked_point = x0;
    sol.mean = mean;
    sol.terms = terms;
    sol.coh_tol = opt.coh_tol;
    std::vector<double> res(M);
    parallel_for(M, [&](std::size_t i) {
        const Vec x = sol.u.node(i);
        res[i] = std::abs(sol.u(f.evaluate(x)) - sol.u.value(i) - psi(x));
    });
    sol.residual = *std::max_element(res.begin(), res.end());
    if (!(sol.residual < opt.coh_tol))
        throw SeriesStall("cohomological residual " + std::to_string(sol.residual) + " exceeds coh_tol");
    return sol;
}

nlohmann::json CohomologySolution::to_json(bool include_values) const {
    nlohmann::json j;
    j["residual"] = residual;
    j["coh_tol"] = coh_tol;
    j["mean"] = mean;
    j["terms"] = terms;
    j["marked_point"] = as_vector(marked_point);
    if (include_values) j["u"] = u.to_json();
    return j;
}

MatchedPotentials matched_normalized_potentials(const ExpandingMap& f1, const ScalarField& phi1,
                                                const ExpandingMap& f2, const ScalarField& phi2,
                                                const ConjugacyEvaluator& h, int resolution,
                                                const EigenOptions& eig) {
    MatchedPotentials m;
    m.first = normalize_potential(f1, GridFunction::sample(f1.dim(), resolution, phi1), eig);
    m.second = normalize_potential(f2, GridFunction::sample(f2.dim(), resolution, phi2), eig);
    const std::size_t M = m.first.phi_hat.size();
    std::vector<double> d(M);
    parallel_for(M, [&](std::size_t i) {
        const Vec x = m.first.phi_hat.node(i);
        d[i] = std::abs(m.second.phi_hat(h(x)) - m.first.phi_hat.value(i));
    });
    m.discrepancy = *std::max_element(d.begin(), d.end());
    return m;
}

nlohmann::json MatchedPotentials::to_json() const {
    return {{"discrepancy", discrepancy},
            {"c1", first.c},
            {"c2", second.c},
            {"normalization_residual1", first.normalization_residual},
            {"normalization_residual2", second.normalization_residual}};
}

}  // namespace rigidlab
