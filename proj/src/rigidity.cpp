#include "rigidlab/rigidity.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/exact.hpp"
#include "rigidlab/parallel.hpp"
#include "rigidlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rigidlab {

namespace {

std::vector<double> as_vector(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// Largest n' <= n with deg^{n'} <= cap.
int feasible_period(long long deg, int n, long long cap) {
    int k = 0;
    long long p = 1;
    while (k < n && p <= cap / deg) {
        p *= deg;
        ++k;
    }
    return std::max(k, 1);
}

bool is_real(const std::complex<double>& z) { return std::abs(z.imag()) <= 1e-12 * std::abs(z); }

}  // namespace

EquivalenceReport jacobian_data_match(const ExpandingMap& f1, const ExpandingMap& f2, const ConjugacyEvaluator& h,
                                      int n_max, const EquivalenceOptions& opt) {
    return check_equivalence(f1, log_jacobian_field(f1), f2, log_jacobian_field(f2), h, n_max, opt);
}

std::vector<std::complex<double>> exterior_power_eigenvalues(const Mat& d, int m) {
    const auto ev = eigenvalues(d);
    const int n = static_cast<int>(ev.size());
    std::vector<std::complex<double>> out;
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + m, true);
    do {
        std::complex<double> p(1.0, 0.0);
        for (int i = 0; i < n; ++i)
            if (pick[i]) p *= ev[i];
        out.push_back(p);
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return out;
}

bool has_power_eigenvalue(const PeriodicOrbit& orbit, int m, long long lambda, double tol) {
    if (lambda == 0) return false;
    const int n = orbit.period;
    const double sign = (lambda < 0 && n % 2 == 1) ? -1.0 : 1.0;
    const double target = std::log(std::abs(static_cast<double>(lambda)));
    for (const auto& mu : exterior_power_eigenvalues(orbit.orbit_differential, m)) {
        if (!is_real(mu) || mu.real() * sign <= 0.0) continue;
        if (std::abs(std::log(std::abs(mu.real())) / n - target) < tol) return true;
    }
    return false;
}

std::vector<std::vector<long long>> default_lambda_sets(const IntMat& L, bool integer_eigenvalues_only) {
    const int dim = static_cast<int>(L.rows());
    std::vector<std::vector<long long>> sets(dim);
    const Mat Ld = L.cast<double>();
    for (int m = 1; m <= dim; ++m) {
        const auto ev = exterior_power_eigenvalues(Ld, m);
        if (integer_eigenvalues_only) {
            for (const auto& e : ev)
                if (is_real(e) && std::abs(e.real() - std::round(e.real())) < 1e-9) {
                    const long long v = std::llround(e.real());
                    if (std::find(sets[m - 1].begin(), sets[m - 1].end(), v) == sets[m - 1].end())
                        sets[m - 1].push_back(v);
                }
            std::sort(sets[m - 1].begin(), sets[m - 1].end());
        } else {
            double rho = 0.0;
            for (const auto& e : ev) rho = std::max(rho, std::abs(e));
            const long long r = static_cast<long long>(std::floor(rho + 1e-9));
            for (long long v = -r; v <= r; ++v) sets[m - 1].push_back(v);
        }
    }
    return sets;
}

NonAlgebraicCertificate very_non_algebraic_certify(const std::vector<PeriodicOrbit>& orbits, int dim,
                                                    const std::vector<std::vector<long long>>& lambda_sets,
                                                    int n_max, double tol) {
    NonAlgebraicCertificate cert;
    cert.n_max = n_max;
    cert.eig_match_tol = tol;
    for (int m = 1; m <= dim; ++m) {
        for (long long lambda : lambda_sets[m - 1]) {
            PowerWitness w;
            w.m = m;
            w.lambda = lambda;
            for (const auto& o : orbits) {
                if (o.period > n_max) continue;
                if (!has_power_eigenvalue(o, m, lambda, tol)) {
                    w.certified = true;
                    w.period = o.period;
                    w.code = o.code_string();
                    w.point = o.base_point;
                    break;
                }
            }
            if (!w.certified && !cert.first_failure) cert.first_failure = w;
            cert.entries.push_back(w);
        }
    }
    cert.certified = !cert.first_failure.has_value();
    return cert;
}

NonAlgebraicCertificate very_non_algebraic_certify(const ExpandingMap& f, int n_max, const NonAlgebraicOptions& opt) {
    const auto orbits = orbits_up_to(f, n_max, opt.cap);
    auto sets = opt.lambda_sets;
    if (sets.empty()) {
        sets = default_lambda_sets(f.linear_part(), opt.integer_eigenvalues_only);
        if (!opt.integer_eigenvalues_only) {
            // Integers beyond every periodic exponent are avoided by any orbit, so the
            // finite range below covers all of Z.
            for (int m = 1; m <= f.dim(); ++m) {
                double top = 0.0;
                for (const auto& o : orbits)
                    for (const auto& mu : exterior_power_eigenvalues(o.orbit_differential, m))
                        top = std::max(top, std::log(std::abs(mu)) / o.period);
                const long long r = static_cast<long long>(std::floor(std::exp(top + opt.eig_match_tol)));
                auto& s = sets[m - 1];
                const long long have = s.empty() ? -1 : s.back();
                for (long long v = have + 1; v <= r; ++v) {
                    s.insert(s.begin(), -v);
                    s.push_back(v);
                }
            }
        }
    } else if (static_cast<int>(sets.size()) != f.dim()) {
        throw PreconditionViolation("one lambda set per exterior power is required");
    }
    return very_non_algebraic_certify(orbits, f.dim(), sets, n_max, opt.eig_match_tol);
}

nlohmann::json NonAlgebraicCertificate::to_json() const {
    nlohmann::json j;
    j["n_max"] = n_max;
    j["certified"] = certified;
    j["eig_match_tol"] = eig_match_tol;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& w : entries) {
        nlohmann::json r{{"m", w.m}, {"lambda", w.lambda}, {"certified", w.certified}};
        if (w.certified) {
            r["witness_period"] = w.period;
            r["witness_code"] = w.code;
            r["witness_point"] = as_vector(w.point);
        }
        rows.push_back(r);
    }
    j["entries"] = rows;
    if (first_failure) j["first_failure"] = {{"m", first_failure->m}, {"lambda", first_failure->lambda}};
    return j;
}

SpectrumComparison disjoint_spectrum_test(const PeriodicOrbit& x, const PeriodicOrbit& y, double tol) {
    SpectrumComparison r;
    r.pass = true;
    const int k = x.period, l = y.period;
    const int dim = static_cast<int>(x.orbit_differential.rows());
    for (int m = 1; m <= dim && r.pass; ++m) {
        const auto ex = exterior_power_eigenvalues(x.orbit_differential, m);
        const auto ey = exterior_power_eigenvalues(y.orbit_differential, m);
        for (const auto& a : ex) {
            if (!is_real(a)) continue;
            // eigenvalues of D_x f^{kl} are a^l, of D_y f^{kl} are b^k
            const double sa = (a.real() < 0 && l % 2 == 1) ? -1.0 : 1.0;
            const double la = std::log(std::abs(a.real())) / k;
            for (const auto& b : ey) {
                if (!is_real(b)) continue;
                const double sb = (b.real() < 0 && k % 2 == 1) ? -1.0 : 1.0;
                const double lb = std::log(std::abs(b.real())) / l;
                if (sa == sb && std::abs(la - lb) < tol) {
                    r.pass = false;
                    r.shared_m = m;
                    r.shared_exponent = la;
                    break;
                }
            }
            if (!r.pass) break;
        }
    }
    return r;
}

nlohmann::json SpectrumComparison::to_json() const {
    nlohmann::json j{{"pass", pass}};
    if (!pass) j["shared"] = {{"m", shared_m}, {"log_eigenvalue_per_period", shared_exponent}};
    return j;
}

CriticalRegularity critical_regularity(const ExpandingMap& f, int n_max, int p_max, int grid, long long cap) {
    CriticalRegularity r;
    const int dim = f.dim();
    if (grid <= 0) grid = dim == 1 ? 1024 : 64;
    const std::size_t sz = dim == 1 ? static_cast<std::size_t>(grid) : static_cast<std::size_t>(grid) * grid;
    std::vector<std::vector<double>> ratios(sz, std::vector<double>(n_max));
    parallel_for(sz, [&](std::size_t i) {
        Vec x(dim);
        x[0] = static_cast<double>(i % grid) / grid;
        if (dim == 2) x[1] = static_cast<double>(i / grid) / grid;
        Mat D = Mat::Identity(dim, dim);
        for (int n = 1; n <= n_max; ++n) {
            D = f.differential(x) * D;
            x = f.evaluate(x);
            ratios[i][n - 1] = std::log(max_singular_value(D)) / std::log(min_singular_value(D));
        }
    });
    r.r0_minmax = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_max; ++n) {
        double mx = 0.0;
        for (const auto& row : ratios) mx = std::max(mx, row[n - 1]);
        if (mx < r.r0_minmax) {
            r.r0_minmax = mx;
            r.argmin_n = n;
        }
    }

    double best = 0.0;
    if (dim == 1) {
        best = 1.0;
    } else if (f.kind() == ExpandingMap::Kind::product) {
        // Periodic points of a product are pairs of factor periodic points.
        auto factor_exponents = [&](const CircleMap& g) {
            std::vector<std::pair<int, double>> out;
            const auto fg = ExpandingMap::circle(g);
            const int p = feasible_period(fg.degree(), p_max, cap);
            for (const auto& o : orbits_up_to(fg, p, cap)) out.emplace_back(o.period, lyapunov_exponents(o)[0]);
            return out;
        };
        const auto ex = factor_exponents(f.x_factor());
        const auto ey = factor_exponents(f.y_factor());
        for (const auto& [p1, a] : ex)
            for (const auto& [p2, b] : ey)
                if (std::lcm(p1, p2) <= p_max) best = std::max(best, std::max(a, b) / std::min(a, b));
    } else {
        const int p = feasible_period(f.degree(), p_max, cap);
        for (const auto& o : orbits_up_to(f, p, cap)) {
            const auto ex = lyapunov_exponents(o);
            best = std::max(best, ex.back() / ex.front());
        }
    }
    r.r0_periodic = best;
    r.gap = r.r0_minmax - r.r0_periodic;
    return r;
}

nlohmann::json CriticalRegularity::to_json() const {
    return {{"r0_minmax", r0_minmax}, {"r0_periodic", r0_periodic}, {"gap", gap}, {"argmin_n", argmin_n}};
}

std::vector<long long> characteristic_polynomial(const IntMatN& L) {
    const int n = static_cast<int>(L.rows());
    using I = __int128;
    std::vector<std::vector<I>> A(n, std::vector<I>(n)), M(n, std::vector<I>(n, 0)), AM(n, std::vector<I>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A[i][j] = L(i, j);
    std::vector<I> c(n + 1, 0);  // c[k] multiplies x^k
    c[n] = 1;
    for (int k = 1; k <= n; ++k) {
        // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                I s = 0;
                for (int t = 0; t < n; ++t) s += A[i][t] * M[t][j];
                AM[i][j] = s + (i == j ? c[n - k + 1] : 0);
            }
        M = AM;
        I tr = 0;
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < n; ++t) tr += A[i][t] * M[t][i];
        c[n - k] = -tr / k;
    }
    std::vector<long long> out;
    for (int k = n; k >= 0; --k) out.push_back(static_cast<long long>(c[k]));
    return out;
}

namespace {

std::vector<std::vector<mpq_class>> poly_of_matrix(const IntMatN& L, const std::vector<long long>& p) {
    const int n = static_cast<int>(L.rows());
    std::vector<std::vector<mpq_class>> R(n, std::vector<mpq_class>(n, 0));
    for (long long coef : p) {  // Horner: R = R L + coef I
        std::vector<std::vector<mpq_class>> T(n, std::vector<mpq_class>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                for (int t = 0; t < n; ++t) T[i][j] += R[i][t] * mpq_class(static_cast<long>(L(t, j)));
                if (i == j) T[i][j] += static_cast<long>(coef);
            }
        R = T;
    }
    return R;
}

__int128 eval_poly(const std::vector<long long>& p, long long x) {
    __int128 s = 0;
    for (long long c : p) s = s * x + c;
    return s;
}

}  // namespace

IrreducibilityResult irreducibility_test(const IntMatN& L) {
    const int n = static_cast<int>(L.rows());
    if (n < 1 || n > 4 || L.cols() != n) throw PreconditionViolation("irreducibility test needs a square matrix of size <= 4");
    IrreducibilityResult r;
    r.char_poly = characteristic_polynomial(L);
    if (n == 1) {
        r.irreducible = true;
        return r;
    }
    const long long a0 = r.char_poly.back();
    std::vector<long long> roots_to_try;
    if (a0 == 0) {
        roots_to_try.push_back(0);
    } else {
        for (long long q = 1; q <= std::llabs(a0); ++q)
            if (a0 % q == 0) {
                roots_to_try.push_back(q);
                roots_to_try.push_back(-q);
            }
    }
    for (long long q : roots_to_try)
        if (eval_poly(r.char_poly, q) == 0) {
            r.factor = {1, -q};
            r.subspace = rational_kernel(poly_of_matrix(L, r.factor));
            return r;
        }
    if (n == 4) {
        const long long a3 = r.char_poly[1], a2 = r.char_poly[2], a1 = r.char_poly[3];
        for (long long c = -std::llabs(a0); c <= std::llabs(a0); ++c) {
            if (c == 0 || a0 % c != 0) continue;
            const long long g = a0 / c;
            const long long disc = a3 * a3 - 4 * (a2 - c - g);
            if (disc < 0) continue;
            const long long s = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(disc))));
            for (long long sq : {s - 1, s, s + 1}) {
                if (sq < 0 || sq * sq != disc || (a3 + sq) % 2 != 0) continue;
                const long long b = (a3 + sq) / 2, e = a3 - b;
                if (b * g + c * e == a1) {
                    r.factor = {1, b, c};
                    r.subspace = rational_kernel(poly_of_matrix(L, r.factor));
                    return r;
                }
            }
        }
    }
    r.irreducible = true;
    return r;
}

nlohmann::json IrreducibilityResult::to_json() const {
    nlohmann::json j{{"irreducible", irreducible}, {"char_poly", char_poly}};
    if (!irreducible) {
        j["factor"] = factor;
        j["invariant_subspace_basis"] = subspace;
    }
    return j;
}

MmeResult mme_not_lebesgue_test(const ExpandingMap& f, int n_max, double tol, long long cap) {
    MmeResult r;
    r.mme_tol = tol;
    const auto orbits = orbits_up_to(f, feasible_period(f.degree(), n_max, cap), cap);
    const PeriodicOrbit* lo = nullptr;
    const PeriodicOrbit* hi = nullptr;
    for (const auto& o : orbits) {
        const double a = o.log_jacobian / o.period;
        if (!lo || a < lo->log_jacobian / lo->period) lo = &o;
        if (!hi || a > hi->log_jacobian / hi->period) hi = &o;
    }
    r.low_average = lo->log_jacobian / lo->period;
    r.high_average = hi->log_jacobian / hi->period;
    r.low_code = lo->code_string();
    r.high_code = hi->code_string();
    r.low_period = lo->period;
    r.high_period = hi->period;
    r.spread = r.high_average - r.low_average;
    r.pass = r.spread > tol;
    return r;
}

nlohmann::json MmeResult::to_json() const {
    return {{"pass", pass},
            {"spread", spread},
            {"mme_tol", mme_tol},
            {"low", {{"code", low_code}, {"period", low_period}, {"average", low_average}}},
            {"high", {{"code", high_code}, {"period", high_period}, {"average", high_average}}}};
}

ConjugacyEvaluator factor_map(const ExpandingMap& f1, const ExpandingMap& f2) {
    if (f2.dim() != 1) throw PreconditionViolation("factor target must be a circle map");
    CircleMap vertical = [&] {
        switch (f1.kind()) {
            case ExpandingMap::Kind::skew: return CircleMap(f1.skew_a(), TrigPoly());
            case ExpandingMap::Kind::product: return f1.y_factor();
            default: throw PreconditionViolation("factor check needs a skew or product map");
        }
    }();
    if (vertical.degree() != f2.linear_part()(0, 0))
        throw LinearPartMismatch("vertical degree differs from the base map degree");
    const auto hb = linearize(ExpandingMap::circle(vertical));
    const auto k2 = delinearize(f2);
    return ConjugacyEvaluator(
        2, [hb, k2](const Vec& x) { return k2.lift(hb.lift(vec1(x[1]))); }, hb.n_terms() + k2.n_terms());
}

FactorReport factor_data_check(const ExpandingMap& f1, const ExpandingMap& f2, const ConjugacyEvaluator& h,
                               int n_max, double match_tol) {
    if (f1.kind() != ExpandingMap::Kind::skew && f1.kind() != ExpandingMap::Kind::product)
        throw PreconditionViolation("factor check needs a skew or product map");
    FactorReport rep;
    {
        const int g = 32;
        std::vector<double> res(g * g);
        parallel_for(res.size(), [&](std::size_t i) {
            const Vec x = vec2(static_cast<double>(i % g) / g, static_cast<double>(i / g) / g);
            res[i] = torus_distance(h(f1.evaluate(x)), f2.evaluate(h(x)));
        });
        rep.semiconjugacy_residual = *std::max_element(res.begin(), res.end());
    }
    const auto o1 = orbits_up_to(f1, n_max);
    const auto o2 = orbits_up_to(f2, n_max);
    PointIndex index(kConjTol);
    for (std::size_t i = 0; i < o2.size(); ++i)
        for (const auto& p : o2[i].points) index.insert(p, i);
    auto& cmp = rep.comparison;
    cmp.max_period_checked = n_max;
    cmp.match_tol = match_tol;
    for (const auto& a : o1) {
        const Vec y = h(a.base_point);
        double dist = 0.0;
        const long long j = index.find_nearest(y, &dist);
        if (j < 0 || !(dist < kConjTol) || a.period % o2[j].period != 0)
            throw OrbitPairingFailure("no base periodic point near the image of orbit " + a.code_string());
        OrbitComparison c;
        c.period = a.period;
        c.code = a.code_string();
        c.point1 = a.base_point;
        c.point2 = y;
        for (const auto& p : a.points) {
            const Mat D = f1.differential(p);
            c.sum1 += std::log(std::abs(D.determinant())) - std::log(std::abs(D(0, 0)));
        }
        c.sum2 = (a.period / o2[j].period) * o2[j].log_jacobian;
        c.discrepancy = std::abs(c.sum1 - c.sum2);
        cmp.max_discrepancy = std::max(cmp.max_discrepancy, c.discrepancy);
        if (c.discrepancy > match_tol * c.period && cmp.first_mismatch_period == 0)
            cmp.first_mismatch_period = c.period;
        cmp.orbits.push_back(c);
    }
    cmp.verdict = cmp.first_mismatch_period ? Verdict::not_equivalent : Verdict::equivalent;
    return rep;
}

nlohmann::json FactorReport::to_json() const {
    nlohmann::json j = comparison.to_json();
    j["semiconjugacy_residual"] = semiconjugacy_residual;
    j["verdict"] = comparison.verdict == Verdict::equivalent ? "match" : "mismatch";
    return j;
}

RigidityVerdict rigidity_check(const ExpandingMap& f1, const ExpandingMap& f2, int n_max, const RigidityOptions& opt) {
    RigidityVerdict v;
    const auto h = conjugacy_between(f1, f2);
    v.conjugacy_residual = h.residual();
    const int n = feasible_period(std::max(f1.degree(), f2.degree()), n_max, kEnumerationCap);
    EquivalenceOptions eq;
    eq.match_tol = opt.match_tol;
    v.jacobian_match = jacobian_data_match(f1, f2, h, n, eq);
    NonAlgebraicOptions na;
    na.eig_match_tol = opt.eig_match_tol;
    v.non_algebraic = very_non_algebraic_certify(f1, n, na);
    const auto orbits = orbits_up_to(f1, std::min(n, 2));
    for (std::size_t a = 0; a < orbits.size() && !v.disjoint_pair; ++a)
        for (std::size_t b = a + 1; b < orbits.size(); ++b)
            if (disjoint_spectrum_test(orbits[a], orbits[b], opt.eig_match_tol).pass) {
                v.disjoint_pair = std::make_pair(orbits[a], orbits[b]);
                break;
            }
    if (f1.dim() == 2) {
        v.irreducibility = irreducibility_test(f1.linear_part().cast<long long>());
        v.mme = mme_not_lebesgue_test(f1, n, opt.mme_tol);
    }
    if (v.jacobian_match.verdict == Verdict::not_equivalent) {
        v.conclusion = "jacobian periodic data differ at period " +
                       std::to_string(v.jacobian_match.first_mismatch_period) + ": the maps are not C^1 conjugate";
        v.exit_code = 2;
        return v;
    }
    std::vector<std::string> certified;
    if (v.disjoint_pair) certified.push_back("disjoint spectrum");
    if (v.non_algebraic.certified) certified.push_back("very non-algebraic");
    if (v.irreducibility && v.irreducibility->irreducible && v.mme && v.mme->pass)
        certified.push_back("irreducible linear part with singular maximal-entropy measure");
    if (certified.empty()) {
        v.conclusion = "jacobian data match but no rigidity hypothesis could be certified";
        v.exit_code = 3;
        return v;
    }
    std::string list;
    for (std::size_t i = 0; i < certified.size(); ++i) list += (i ? "; " : "") + certified[i];
    v.conclusion = "hypotheses certified (" + list + ") and jacobian data match through period " +
                   std::to_string(n) + ": conjugacy predicted C^r";
    v.exit_code = 0;
    return v;
}

nlohmann::json RigidityVerdict::to_json() const {
    nlohmann::json j;
    j["jacobian_match"] = jacobian_match.to_json(false);
    j["jacobian_match"]["status"] = jacobian_match.verdict == Verdict::equivalent ? "match" : "mismatch";
    j["conjugacy_residual"] = conjugacy_residual;
    nlohmann::json hc;
    hc["very_non_algebraic"] = non_algebraic.to_json();
    if (disjoint_pair) {
        hc["disjoint_spectrum"] = {{"pass", true},
                                   {"x", disjoint_pair->first.code_string()},
                                   {"y", disjoint_pair->second.code_string()}};
    } else {
        hc["disjoint_spectrum"] = {{"pass", false}};
    }
    if (irreducibility) hc["irreducible_linear_part"] = irreducibility->to_json();
    if (mme) hc["mme_not_absolutely_continuous"] = mme->to_json();
    j["hypothesis_certificates"] = hc;
    j["conclusion"] = conclusion;
    j["exit_code"] = exit_code;
    return j;
}

}  // namespace rigidlab
