#include "rigidlab/cli.hpp"

#include "rigidlab/cohomology.hpp"
#include "rigidlab/conjugacy.hpp"
#include "rigidlab/errors.hpp"
#include "rigidlab/lattice.hpp"
#include "rigidlab/periodic.hpp"
#include "rigidlab/potential.hpp"
#include "rigidlab/regularity.hpp"
#include "rigidlab/rigidity.hpp"
#include "rigidlab/transfer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>

namespace rigidlab {

namespace {

using json = nlohmann::json;
constexpr double kPi = std::numbers::pi;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

double tol_or(const std::optional<double>& t, double fallback) { return t ? *t : fallback; }

int period_or(const ExperimentConfig& c, int fallback) { return c.period_cap > 0 ? c.period_cap : fallback; }

long long cap_or_default(const ExperimentConfig& c) { return c.enumeration_cap > 0 ? c.enumeration_cap : kEnumerationCap; }

int resolution_for(const ExperimentConfig& c, const ExpandingMap& f, int one_d, int two_d) {
    if (c.resolution > 0) return c.resolution;
    return f.dim() == 1 ? one_d : two_d;
}

ExpandingMap require_map(const std::optional<json>& j, const std::string& key) {
    if (!j) throw ConfigError("config needs '" + key + "'");
    return ExpandingMap::from_json(*j);
}

/// The linear map with the same linear part as f.
ExpandingMap linear_model(const ExpandingMap& f) {
    if (f.dim() == 1) return ExpandingMap::circle(f.linear_part()(0, 0), TrigPoly());
    return ExpandingMap::linear(f.linear_part());
}

ScalarField potential_or_zero(const std::optional<json>& j, const ExpandingMap& f) {
    if (!j) return [](const Vec&) { return 0.0; };
    return potential_from_json(*j, f);
}

EigenOptions eigen_options(const ExperimentConfig& c) {
    EigenOptions e;
    e.eig_tol = tol_or(c.tolerances.eig_tol, kEigTol);
    return e;
}

EquivalenceOptions equivalence_options(const ExperimentConfig& c) {
    EquivalenceOptions e;
    e.match_tol = tol_or(c.tolerances.match_tol, kMatchTol);
    e.pairing_tol = tol_or(c.tolerances.conj_tol, kConjTol);
    e.cap = cap_or_default(c);
    return e;
}

ConjugacyOptions conjugacy_options(const ExperimentConfig& c) {
    ConjugacyOptions o;
    o.truncation_tol = tol_or(c.tolerances.truncation_tol, kTruncationTol);
    return o;
}

TrigPoly trig_option(const json& options, const std::string& key, const TrigPoly& fallback) {
    if (!options.contains(key)) return fallback;
    check_keys(options.at(key), {"cos_coeffs", "sin_coeffs", "constant"}, key);
    return TrigPoly::from_json(options.at(key));
}

double regularity_option(const json& options) {
    if (!options.contains("r")) return std::numeric_limits<double>::infinity();
    const auto& r = options.at("r");
    if (r.is_string()) {
        if (r.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw ConfigError("'r' must be a number or \"inf\"");
    }
    return r.get<double>();
}

json orbit_json(const PeriodicOrbit& o) {
    return {{"period", o.period},
            {"code", o.code_string()},
            {"base_point", vec_json(o.base_point)},
            {"log_jacobian", o.log_jacobian},
            {"lyapunov_exponents", lyapunov_exponents(o)}};
}

// ---------------------------------------------------------------------------

RunResult run_periodic_points(const ExperimentConfig& c) {
    check_keys(c.options, {}, "options");
    const auto f = require_map(c.map, "map");
    const int n_max = period_or(c, 4);
    const auto orbits = orbits_up_to(f, n_max, cap_or_default(c));
    RunResult r;
    json counts = json::array();
    for (int n = 1; n <= n_max; ++n) {
        long long found = 0;
        for (const auto& o : orbits)
            if (n % o.period == 0) found += o.period;
        counts.push_back({{"n", n}, {"fixed_points", found}, {"expected", fixed_point_count_of_linear_part(f.linear_part(), n)}});
    }
    json list = json::array();
    for (const auto& o : orbits) list.push_back(orbit_json(o));
    r.report = {{"max_period", n_max}, {"orbit_count", orbits.size()}, {"fixed_point_counts", counts}, {"orbits", list},
                {"dedup_tol", kDedupTol}};
    r.files["orbits.csv"] = orbits_to_csv(orbits);
    return r;
}

RunResult run_transfer_spectrum(const ExperimentConfig& c) {
    check_keys(c.options, {"periodic_pressure_period"}, "options");
    const auto f = require_map(c.map, "map");
    const auto phi_field = potential_or_zero(c.potential, f);
    const int N = resolution_for(c, f, kDefaultResolution1D, kDefaultResolution2D);
    const auto phi = GridFunction::sample(f.dim(), N, phi_field);
    const auto eig = leading_eigendata(f, phi, eigen_options(c));
    RunResult r;
    r.report = eig.to_json(false);
    r.report["resolution"] = N;
    if (c.options.contains("periodic_pressure_period")) {
        const int n = get_or<int>(c.options, "periodic_pressure_period", 10);
        r.report["periodic_pressure"] = {{"n", n}, {"value", pressure_via_periodic_orbits(f, phi_field, n, cap_or_default(c))}};
    }
    r.files["eigenfunction.csv"] = eig.u.to_csv("log_eigenfunction");
    return r;
}

RunResult run_normalize_potential(const ExperimentConfig& c) {
    check_keys(c.options, {}, "options");
    const auto f = require_map(c.map, "map");
    const int N = resolution_for(c, f, kDefaultResolution1D, kDefaultResolution2D);
    const auto phi = GridFunction::sample(f.dim(), N, potential_or_zero(c.potential, f));
    const auto np = normalize_potential(f, phi, eigen_options(c));
    RunResult r;
    r.report = np.to_json(false);
    r.report["resolution"] = N;
    r.files["phi_hat.csv"] = np.phi_hat.to_csv("phi_hat");
    r.files["eigenfunction.csv"] = np.u.to_csv("log_eigenfunction");
    return r;
}

RunResult run_livshits(const ExperimentConfig& c) {
    check_keys(c.options, {"precondition_period", "max_terms"}, "options");
    const auto f = require_map(c.map, "map");
    RunResult r;
    if (c.psi) {
        CohomologyOptions opt;
        opt.resolution = c.resolution;
        opt.coh_tol = tol_or(c.tolerances.coh_tol, kCohTol);
        opt.precondition_tol = tol_or(c.tolerances.match_tol, kMatchTol);
        opt.precondition_period = get_or<int>(c.options, "precondition_period", opt.precondition_period);
        opt.max_terms = get_or<int>(c.options, "max_terms", opt.max_terms);
        const auto psi = potential_from_json(*c.psi, f);
        const auto obstruction = periodic_obstruction(f, psi, opt.precondition_period, equivalence_options(c));
        r.report["periodic_obstruction"] = obstruction.to_json(false);
        if (obstruction.verdict != Verdict::equivalent) {
            r.report["status"] = "obstructed";
            r.exit_code = 2;
            return r;
        }
        const auto sol = solve_cohomological_equation(f, psi, opt);
        r.report["solution"] = sol.to_json(false);
        r.report["status"] = "solved";
        r.files["transfer_function.csv"] = sol.u.to_csv("u");
        return r;
    }
    // Equivalence of two potentials through periodic sums.
    const auto f2 = c.map2 ? ExpandingMap::from_json(*c.map2) : f;
    const auto phi1 = potential_or_zero(c.potential, f);
    const auto phi2 = potential_or_zero(c.potential2, f2);
    const auto h = conjugacy_between(f, f2, conjugacy_options(c));
    const auto rep = check_equivalence(f, phi1, f2, phi2, h, period_or(c, 6), equivalence_options(c));
    r.report["equivalence"] = rep.to_json(true);
    r.report["status"] = to_string(rep.verdict);
    r.exit_code = rep.verdict == Verdict::equivalent ? 0 : (rep.verdict == Verdict::not_equivalent ? 2 : 3);
    return r;
}

RunResult run_conjugacy(const ExperimentConfig& c) {
    check_keys(c.options, {"snapshot_resolution"}, "options");
    const auto f1 = require_map(c.map, "map");
    const auto f2 = c.map2 ? ExpandingMap::from_json(*c.map2) : linear_model(f1);
    const auto h = conjugacy_between(f1, f2, conjugacy_options(c));
    const int grid = c.resolution > 0 ? c.resolution : (f1.dim() == 1 ? 1024 : 32);
    RunResult r;
    r.report["conjugacy"] = h.to_json();
    r.report["residual_grid"] = grid;
    r.report["residual"] = conjugation_residual(h, f1, f2, grid);
    r.report["conj_tol"] = tol_or(c.tolerances.conj_tol, kConjTol);
    if (f1.dim() == 1) {
        r.report["monotone"] = lift_is_increasing(h, grid);
        // local exponent of h at a fixed point 0 of f1 when f2 is linear
        const auto& g = f1.x_factor();
        const bool f2_linear = f2.kind() == ExpandingMap::Kind::circle && f2.x_factor().alpha().is_zero() &&
                               !f2.x_factor().conjugated();
        if (f2_linear && g.lift(0.0) == 0.0 && std::abs(g.derivative(0.0) - g.degree()) > 1e-9) {
            const double theta = local_scaling_exponent(g);
            const double d = std::abs(static_cast<double>(g.degree()));
            r.report["local_exponent_at_0"] = {{"estimate", theta},
                                               {"predicted", std::log(d) / std::log(std::abs(g.derivative(0.0)))},
                                               {"tolerance", 0.05}};
        }
    }
    r.report["pass"] = r.report["residual"].get<double>() < 10 * tol_or(c.tolerances.conj_tol, kConjTol);
    const int snap = get_or<int>(c.options, "snapshot_resolution", f1.dim() == 1 ? 256 : 32);
    r.files["conjugacy.csv"] = h.snapshot_csv(snap);
    return r;
}

RunResult run_fiber_estimate(const ExperimentConfig& c) {
    check_keys(c.options, {}, "options");
    const auto f = require_map(c.map, "map");
    const int N = resolution_for(c, f, kDefaultResolution1D, 64);
    std::vector<GridFunction> hats;
    for (const auto& p : c.potentials)
        hats.push_back(normalize_potential(f, GridFunction::sample(f.dim(), N, potential_from_json(p, f)), eigen_options(c)).phi_hat);
    const auto rep = fiber_direction_estimate(hats, f.dim(), N, tol_or(c.tolerances.kernel_tol, kKernelTol));
    RunResult r;
    r.report = rep.to_json(false);
    if (f.dim() == 2) {
        r.report["fraction_horizontal"] = rep.fraction_spanned_by(vec2(1.0, 0.0));
        r.report["fraction_vertical"] = rep.fraction_spanned_by(vec2(0.0, 1.0));
    }
    r.files["fiber.csv"] = rep.to_csv();
    return r;
}

RunResult run_rigidity_check(const ExperimentConfig& c) {
    check_keys(c.options, {"critical_regularity"}, "options");
    const auto f1 = require_map(c.map, "map");
    const auto f2 = c.map2 ? ExpandingMap::from_json(*c.map2) : linear_model(f1);
    RigidityOptions opt;
    opt.match_tol = tol_or(c.tolerances.match_tol, kMatchTol);
    opt.eig_match_tol = tol_or(c.tolerances.eig_match_tol, kEigMatchTol);
    opt.mme_tol = tol_or(c.tolerances.mme_tol, kMmeTol);
    const auto v = rigidity_check(f1, f2, period_or(c, 6), opt);
    RunResult r;
    r.report = v.to_json();
    if (get_or<bool>(c.options, "critical_regularity", true))
        r.report["critical_regularity"] = critical_regularity(f1).to_json();
    r.exit_code = v.exit_code;
    return r;
}

RunResult run_factor_check(const ExperimentConfig& c) {
    check_keys(c.options, {}, "options");
    const auto f1 = require_map(c.map, "map");
    const auto f2 = require_map(c.map2, "map2");
    const auto h = factor_map(f1, f2);
    const auto rep = factor_data_check(f1, f2, h, period_or(c, 3), tol_or(c.tolerances.match_tol, kMatchTol));
    RunResult r;
    r.report = rep.to_json();
    r.exit_code = rep.comparison.verdict == Verdict::equivalent ? 0 : 2;
    return r;
}

RunResult run_regularity(const ExperimentConfig& c) {
    check_keys(c.options, {"alpha", "d", "a", "r", "max_order"}, "options");
    const auto alpha = trig_option(c.options, "alpha", TrigPoly::sine(1, 1.0));
    const long long d = get_or<long long>(c.options, "d", 3), a = get_or<long long>(c.options, "a", 2);
    const int N = c.resolution > 0 ? c.resolution : kDllResolution;
    const double tail = tol_or(c.tolerances.tail_tol, kTailTol);
    const auto beta = dll_beta(alpha, d, a, tail, N);
    HolderOptions ho;
    ho.max_order = get_or<int>(c.options, "max_order", ho.max_order);
    const auto est = holder_exponent(beta, ho);
    const auto cls = classify_dll_case(regularity_option(c.options), d, a);
    RunResult r;
    r.report["holder_estimate"] = est.to_json();
    r.report["estimated_regularity"] = est.integer_part + est.exponent;
    r.report["classification"] = cls.to_json();
    r.report["functional_residual"] = dll_functional_residual(beta, alpha, d, a);
    r.report["tail_tol"] = tail;
    r.report["resolution"] = N;
    if (d > a) {
        // first differences of the derivative, pure power against power times |log h|
        const auto db = dll_beta_derivative(alpha, d, a, tail, N);
        std::vector<ScaleRow> rows;
        for (int s = ho.min_log2_h; s <= ho.max_log2_h; ++s) {
            const int step = N >> s;
            double sup = 0.0;
            for (int x = 0; x < N; ++x) sup = std::max(sup, std::abs(db.value((x + step) % N) - db.value(x)));
            rows.push_back({static_cast<double>(step) / N, sup});
        }
        const auto pure = fit_power(rows, false), logged = fit_power(rows, true);
        r.report["derivative_difference_fit"] = {{"pure_power_rss", pure.rss},
                                                 {"log_corrected_rss", logged.rss},
                                                 {"pure_power_slope", pure.slope},
                                                 {"log_model_preferred", logged.rss < pure.rss}};
    }
    r.files["scales.csv"] = est.to_csv();
    return r;
}

RunResult run_dll_beta(const ExperimentConfig& c) {
    check_keys(c.options, {"alpha", "d", "a"}, "options");
    const auto alpha = trig_option(c.options, "alpha", TrigPoly::sine(1, 1.0));
    const long long d = get_or<long long>(c.options, "d", 3), a = get_or<long long>(c.options, "a", 2);
    const int N = c.resolution > 0 ? c.resolution : kDllResolution;
    const double tail = tol_or(c.tolerances.tail_tol, kTailTol);
    const auto beta = dll_beta(alpha, d, a, tail, N);
    RunResult r;
    const double res = dll_functional_residual(beta, alpha, d, a);
    r.report = {{"d", d},
                {"a", a},
                {"resolution", N},
                {"tail_tol", tail},
                {"functional_residual", res},
                {"pass", res < tail},
                {"sup_norm", beta.sup_norm()},
                {"r0", std::log(static_cast<double>(d)) / std::log(static_cast<double>(a))}};
    r.files["beta.csv"] = beta.to_csv("beta");
    return r;
}

json lattice_section(const std::string& target, int k, const TrigPoly& alpha, bool& pass) {
    json out;
    if (target == "heisenberg" || target == "all") {
        const auto a = coset_commutation_sweep(k);
        const auto b = normal_subgroup_sweep(k);
        out["heisenberg"] = {{"dilation_is_endomorphism", dilation_is_lattice_endomorphism(Dilation{})},
                             {"coset_commutation", a.to_json()},
                             {"normal_subgroup", b.to_json()}};
        pass = pass && a.pass && b.pass && dilation_is_lattice_endomorphism(Dilation{});
    }
    if (target == "infratorus" || target == "all") {
        const auto rep = infratorus_report();
        out["infratorus"] = rep.to_json();
        pass = pass && rep.pass;
    }
    if (target == "klein" || target == "all") {
        const auto rep = klein_report(alpha);
        out["klein"] = rep.to_json();
        pass = pass && rep.pass;
    }
    if (out.is_null()) throw ConfigError("lattice target must be heisenberg, infratorus, klein or all");
    return out;
}

RunResult run_lattice_verify(const ExperimentConfig& c) {
    check_keys(c.options, {"target", "word_length", "alpha"}, "options");
    const auto target = get_or<std::string>(c.options, "target", "all");
    const int k = get_or<int>(c.options, "word_length", 4);
    const auto alpha = trig_option(c.options, "alpha", TrigPoly::sine(2, 0.01));
    bool pass = true;
    RunResult r;
    r.report = lattice_section(target, k, alpha, pass);
    r.report["target"] = target;
    r.report["pass"] = pass;
    r.exit_code = pass ? 0 : 2;
    return r;
}

// --- built-in example suite -------------------------------------------------

IntMat diag_matrix(long long a, long long b) {
    IntMat L(2, 2);
    L << a, 0, 0, b;
    return L;
}

/// g(x) = 2x - (0.5 / 2 pi) sin 2 pi x with g'(0) = 1.5.
CircleMap slow_fixed_point_map() { return CircleMap(2, TrigPoly::sine(1, -0.5 / (2 * kPi))); }

json example_nowhere_differentiable(bool& pass) {
    const auto g = slow_fixed_point_map();
    const auto f1 = ExpandingMap::product(g, CircleMap(2, TrigPoly()));
    const auto f2 = ExpandingMap::linear(diag_matrix(2, 2));
    const auto h = conjugacy_between(f1, f2);
    const double residual = conjugation_residual(h, f1, f2, 32);

    const auto g1 = ExpandingMap::circle(g);
    const auto h0 = conjugacy_between(g1, ExpandingMap::circle(2, TrigPoly()));
    const double residual_1d = conjugation_residual(h0, g1, ExpandingMap::circle(2, TrigPoly()), 1024);
    const bool monotone = lift_is_increasing(h0, 1024);
    const double theta = local_scaling_exponent(g);
    const double predicted = std::log(2.0) / std::log(g.derivative(0.0));

    const auto cos_y = trig_field(TrigPoly::cosine(1), 1);
    const auto matched = matched_normalized_potentials(f1, cos_y, f2, cos_y, h, 64);

    std::vector<GridFunction> hats;
    for (const auto& p : {TrigPoly::cosine(1), TrigPoly::sine(1)})
        hats.push_back(normalize_potential(f1, GridFunction::sample(2, 64, trig_field(p, 1))).phi_hat);
    const auto fiber = fiber_direction_estimate(hats, 2, 64);
    const double horizontal = fiber.fraction_spanned_by(vec2(1.0, 0.0));

    std::vector<GridFunction> control;
    for (int axis : {0, 1})
        control.push_back(normalize_potential(f2, GridFunction::sample(2, 64, trig_field(TrigPoly::cosine(1), axis))).phi_hat);
    const auto control_fiber = fiber_direction_estimate(control, 2, 64);

    const bool ok = residual < 1e-7 && residual_1d < 1e-7 && monotone && std::abs(theta - predicted) < 0.05 &&
                    matched.discrepancy < 1e-6 && fiber.min_dimension == 1 && horizontal >= 0.99 &&
                    control_fiber.min_dimension == 0;
    pass = pass && ok;
    return {{"pass", ok},
            {"conjugacy_residual", residual},
            {"circle_conjugacy_residual", residual_1d},
            {"conj_tol", kConjTol},
            {"monotone", monotone},
            {"local_exponent_at_0", {{"estimate", theta}, {"predicted", predicted}, {"tolerance", 0.05}}},
            {"matched_potential_discrepancy", matched.discrepancy},
            {"fiber", fiber.to_json(false)},
            {"fiber_fraction_horizontal", horizontal},
            {"control_fiber", control_fiber.to_json(false)}};
}

json example_weierstrass_shear(bool& pass) {
    const TrigPoly alpha = TrigPoly::sine(1, 0.1);
    const auto f = ExpandingMap::skew(3, 2, alpha);
    const auto h = linearize(f);
    const auto beta = dll_beta(alpha, 3, 2, kTailTol, 1024);
    double shear_gap = 0.0;
    for (int j = 0; j < 1024; ++j) {
        const Vec p = vec2(0.0, j / 1024.0);
        shear_gap = std::max(shear_gap, std::abs(h.lift(p)[0] - beta.value(j)));
    }
    const auto fine = dll_beta(alpha, 3, 2);
    const auto est = holder_exponent(fine);
    const auto cls = classify_dll_case(std::numeric_limits<double>::infinity(), 3, 2);
    const double estimated = est.integer_part + est.exponent;
    const bool ok = shear_gap < 1e-8 && std::abs(estimated - cls.r0) < 0.05 && cls.dll_case == DllCase::II;
    pass = pass && ok;
    return {{"pass", ok},
            {"shear_gap", shear_gap},
            {"holder_estimate", est.to_json()},
            {"estimated_regularity", estimated},
            {"classification", cls.to_json()},
            {"conjugacy_residual", h.residual()}};
}

json example_infratorus(bool& pass) {
    const auto rep = infratorus_report();
    pass = pass && rep.pass;
    return rep.to_json();
}

json example_klein(bool& pass) {
    const auto good = klein_report(TrigPoly::sine(2, 0.01));
    const auto bad = klein_report(TrigPoly::sine(1, 0.01));
    const bool ok = good.pass && !bad.pass && bad.witness && *bad.witness == 0.25;
    pass = pass && ok;
    return {{"pass", ok}, {"even_harmonic", good.to_json()}, {"odd_harmonic_control", bad.to_json()}};
}

json example_two_fixed_points(bool& pass) {
    CircleMap g1(3, TrigPoly({}, {-0.5 / (4 * kPi), -1.5 / (8 * kPi)}));
    CircleMap g2(3, TrigPoly({}, {-1.0 / (8 * kPi), 1.0 / (16 * kPi)}));
    const auto f = ExpandingMap::product(g1, g2);
    const auto v = rigidity_check(f, f, 2);
    const bool ok = v.exit_code == 0 && v.disjoint_pair.has_value() && v.non_algebraic.certified;
    pass = pass && ok;
    json j = v.to_json();
    j["pass"] = ok;
    return j;
}

const std::vector<std::pair<std::string, std::function<json(bool&)>>>& example_cases() {
    static const std::vector<std::pair<std::string, std::function<json(bool&)>>> cases = {
        {"nowhere-differentiable", example_nowhere_differentiable},
        {"weierstrass-shear", example_weierstrass_shear},
        {"two-fixed-points", example_two_fixed_points},
        {"infratorus", example_infratorus},
        {"klein-bottle", example_klein},
    };
    return cases;
}

RunResult run_examples(const ExperimentConfig& c) {
    check_keys(c.options, {"case"}, "options");
    const auto which = get_or<std::string>(c.options, "case", "all");
    RunResult r;
    bool pass = true;
    json cases = json::object();
    for (const auto& [name, fn] : example_cases())
        if (which == "all" || which == name) cases[name] = fn(pass);
    if (cases.empty()) {
        std::string names;
        for (const auto& [name, fn] : example_cases()) names += " " + name;
        throw ConfigError("unknown example case '" + which + "'; known:" + names + " all");
    }
    r.report = {{"case", which}, {"cases", cases}, {"pass", pass}};
    r.exit_code = pass ? 0 : 2;
    return r;
}

using Runner = RunResult (*)(const ExperimentConfig&);

const std::vector<std::pair<std::string, Runner>>& runners() {
    static const std::vector<std::pair<std::string, Runner>> r = {
        {"periodic-points", run_periodic_points},
        {"transfer-spectrum", run_transfer_spectrum},
        {"normalize-potential", run_normalize_potential},
        {"livshits-solve", run_livshits},
        {"conjugacy", run_conjugacy},
        {"fiber-estimate", run_fiber_estimate},
        {"rigidity-check", run_rigidity_check},
        {"factor-check", run_factor_check},
        {"regularity", run_regularity},
        {"dll-beta", run_dll_beta},
        {"lattice-verify", run_lattice_verify},
        {"examples", run_examples},
    };
    return r;
}

json envelope(const std::string& subcommand, const ExperimentConfig& cfg) {
    return {{"experiment_id", cfg.experiment_id},
            {"subcommand", subcommand},
            {"artifact_version", kArtifactVersion},
            {"config", cfg.to_json()}};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    check_keys(j, {"experiment_id", "map", "map2", "potential", "potential2", "potentials", "psi", "tolerances",
                   "resolution", "period_cap", "enumeration_cap", "output_dir", "options"},
               "config");
    ExperimentConfig c;
    c.experiment_id = get_or<std::string>(j, "experiment_id", c.experiment_id);
    for (auto [key, slot] : {std::pair{"map", &c.map}, {"map2", &c.map2}, {"potential", &c.potential},
                             {"potential2", &c.potential2}, {"psi", &c.psi}})
        if (j.contains(key)) *slot = j.at(key);
    if (j.contains("potentials")) {
        if (!j.at("potentials").is_array()) throw ConfigError("'potentials' must be an array");
        for (const auto& p : j.at("potentials")) c.potentials.push_back(p);
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        check_keys(t, {"eig_tol", "match_tol", "coh_tol", "conj_tol", "kernel_tol", "eig_match_tol", "mme_tol",
                       "tail_tol", "truncation_tol"},
                   "tolerances");
        auto& T = c.tolerances;
        for (auto [key, slot] : {std::pair{"eig_tol", &T.eig_tol}, {"match_tol", &T.match_tol}, {"coh_tol", &T.coh_tol},
                                 {"conj_tol", &T.conj_tol}, {"kernel_tol", &T.kernel_tol},
                                 {"eig_match_tol", &T.eig_match_tol}, {"mme_tol", &T.mme_tol},
                                 {"tail_tol", &T.tail_tol}, {"truncation_tol", &T.truncation_tol}})
            if (t.contains(key)) *slot = get_or<double>(t, key, 0.0);
    }
    c.resolution = get_or<int>(j, "resolution", 0);
    c.period_cap = get_or<int>(j, "period_cap", 0);
    c.enumeration_cap = get_or<long long>(j, "enumeration_cap", 0);
    c.output_dir = get_or<std::string>(j, "output_dir", "");
    if (j.contains("options")) {
        if (!j.at("options").is_object()) throw ConfigError("'options' must be an object");
        c.options = j.at("options");
    }
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    const auto& T = tolerances;
    for (const auto* t : {&T.eig_tol, &T.match_tol, &T.coh_tol, &T.conj_tol, &T.kernel_tol, &T.eig_match_tol,
                          &T.mme_tol, &T.tail_tol, &T.truncation_tol})
        if (*t && !(**t > 0.0 && std::isfinite(**t))) throw ConfigError("tolerances must be positive");
    if (resolution != 0 && (resolution < 16 || !is_power_of_two(resolution)))
        throw ConfigError("resolution must be a power of two >= 16");
    if (period_cap < 0 || period_cap > 30) throw ConfigError("period cap must lie in [1, 30]");
    if (enumeration_cap < 0) throw ConfigError("enumeration cap must be positive");
}

json ExperimentConfig::to_json() const {
    json j;
    j["experiment_id"] = experiment_id;
    if (map) j["map"] = *map;
    if (map2) j["map2"] = *map2;
    if (potential) j["potential"] = *potential;
    if (potential2) j["potential2"] = *potential2;
    if (psi) j["psi"] = *psi;
    if (!potentials.empty()) j["potentials"] = potentials;
    json t = json::object();
    const auto& T = tolerances;
    for (auto [key, slot] : {std::pair{"eig_tol", &T.eig_tol}, {"match_tol", &T.match_tol}, {"coh_tol", &T.coh_tol},
                             {"conj_tol", &T.conj_tol}, {"kernel_tol", &T.kernel_tol},
                             {"eig_match_tol", &T.eig_match_tol}, {"mme_tol", &T.mme_tol}, {"tail_tol", &T.tail_tol},
                             {"truncation_tol", &T.truncation_tol}})
        if (*slot) t[key] = **slot;
    j["tolerances"] = t;
    j["resolution"] = resolution;
    j["period_cap"] = period_cap;
    j["enumeration_cap"] = enumeration_cap;
    j["options"] = options;
    return j;
}

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : runners()) n.push_back(name);
        return n;
    }();
    return names;
}

RunResult run_subcommand(const std::string& name, const ExperimentConfig& cfg) {
    for (const auto& [n, fn] : runners()) {
        if (n != name) continue;
        const auto start = std::chrono::steady_clock::now();
        RunResult r = fn(cfg);
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json out = envelope(name, cfg);
        out["result"] = std::move(r.report);
        out["exit_code"] = r.exit_code;
        r.report = std::move(out);
        return r;
    }
    throw ConfigError("unknown subcommand '" + name + "'");
}

json error_report(const std::string& subcommand, const ExperimentConfig& cfg, const std::string& error,
                  const std::string& message, int exit_code) {
    json out = envelope(subcommand, cfg);
    out["error"] = {{"type", error}, {"message", message}};
    out["exit_code"] = exit_code;
    return out;
}

void write_outputs(const RunResult& result, const std::string& subcommand, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream os(fs::path(dir) / name, std::ios::binary);
        if (!os) throw ConfigError("cannot write '" + name + "' in '" + dir + "'");
        os << text;
    };
    write("report.json", result.report.dump(2) + "\n");
    write("timings.json", json{{"subcommand", subcommand}, {"wall_seconds", result.wall_seconds}}.dump(2) + "\n");
    for (const auto& [name, text] : result.files) write(name, text);
}

}  // namespace rigidlab
