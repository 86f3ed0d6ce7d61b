#include "rigidlab/lattice.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/linalg.hpp"
#include "rigidlab/parallel.hpp"
#include "rigidlab/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rigidlab {

namespace {

bool is_integer(const mpq_class& q) { return q.get_den() == 1; }

mpz_class floor_q(const mpq_class& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

long long denominator(const mpq_class& q) { return q.get_den().get_si(); }

nlohmann::json q_json(const mpq_class& q) { return q.get_str(); }

nlohmann::json qvec_json(const QVector& v) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& q : v) j.push_back(q_json(q));
    return j;
}

std::vector<HeisenbergElement> with_inverses(const std::vector<HeisenbergElement>& gens) {
    std::vector<HeisenbergElement> out;
    for (const auto& g : gens) {
        out.push_back(g);
        out.push_back(g.inverse());
    }
    return out;
}

LatticeCounterexample make_counterexample(int j, const HeisenbergElement& a, const HeisenbergElement& b,
                                          std::string reason) {
    return {j, a, b, std::move(reason)};
}

/// Runs check(i, k) over all index pairs, keeping the counterexample with the smallest (i, k).
template <class Check>
void sweep_pairs(std::size_t n1, std::size_t n2, LemmaSweep& out, Check check) {
    std::vector<std::optional<LatticeCounterexample>> found(n1);
    parallel_for(n1, [&](std::size_t i) {
        for (std::size_t k = 0; k < n2; ++k)
            if (auto c = check(i, k)) {
                found[i] = std::move(c);
                return;
            }
    });
    out.pairs_checked += static_cast<long long>(n1 * n2);
    for (auto& f : found)
        if (f) {
            out.pass = false;
            if (!out.counterexample) out.counterexample = std::move(f);
            return;
        }
}

}  // namespace

HeisenbergElement HeisenbergElement::operator*(const HeisenbergElement& o) const {
    return {a + o.a, b + o.b, c + o.c + a * o.b};
}

HeisenbergElement HeisenbergElement::inverse() const { return {-a, -b, -c + a * b}; }

bool HeisenbergElement::operator<(const HeisenbergElement& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    return c < o.c;
}

std::string HeisenbergElement::to_string() const {
    return "(" + a.get_str() + ", " + b.get_str() + ", " + c.get_str() + ")";
}

HeisenbergElement commutator(const HeisenbergElement& g, const HeisenbergElement& h) {
    return g * h * g.inverse() * h.inverse();
}

HeisenbergElement Dilation::operator()(const HeisenbergElement& g) const {
    return {g.a * static_cast<long>(p), g.b * static_cast<long>(q), g.c * static_cast<long>(s)};
}

HeisenbergElement Dilation::inverse(const HeisenbergElement& g) const {
    return {g.a / static_cast<long>(p), g.b / static_cast<long>(q), g.c / static_cast<long>(s)};
}

bool lcs_membership(const HeisenbergElement& g, int j) {
    if (j <= 0) return is_integer(g.a) && is_integer(g.b) && is_integer(g.c);
    if (j == 1) return g.a == 0 && g.b == 0 && is_integer(g.c);
    return g == HeisenbergElement{};
}

bool preimage_membership(const HeisenbergElement& g, int j, const Dilation& A) { return lcs_membership(A(g), j); }

std::optional<std::pair<HeisenbergElement, HeisenbergElement>> factor_lattice_left(const HeisenbergElement& g, int j,
                                                                                    const Dilation& A) {
    // g = (p,q,r) alpha' with alpha' = (g_a - p, g_b - q, g_c - r + p q - p g_b).
    const HeisenbergElement target = A(g);
    if (j >= 1 && !(is_integer(g.a) && is_integer(g.b))) return std::nullopt;
    if (j <= 0 && !(is_integer(target.a) && is_integer(target.b))) return std::nullopt;
    const mpz_class p0 = floor_q(g.a), q = floor_q(g.b);
    // Only p modulo the denominator of s g_b affects the central condition.
    const long long span = j <= 0 ? denominator(mpq_class(g.b * static_cast<long>(A.s))) : 1;
    for (long off = 0; off < span; ++off) {
        const mpq_class p = mpq_class(p0 + off);
        const mpq_class c_rem = g.c + p * mpq_class(q) - p * g.b;
        const mpq_class r = j >= 2 ? c_rem : mpq_class(floor_q(c_rem));
        if (!is_integer(r)) continue;
        HeisenbergElement gamma{p, mpq_class(q), r};
        HeisenbergElement alpha = gamma.inverse() * g;
        if (preimage_membership(alpha, j, A) && gamma * alpha == g) return std::make_pair(gamma, alpha);
    }
    return std::nullopt;
}

std::optional<std::pair<HeisenbergElement, HeisenbergElement>> factor_lattice_right(const HeisenbergElement& g, int j,
                                                                                     const Dilation& A) {
    // g = alpha' (p,q,r) with alpha' = (g_a - p, g_b - q, g_c - r + p q - g_a q).
    const HeisenbergElement target = A(g);
    if (j >= 1 && !(is_integer(g.a) && is_integer(g.b))) return std::nullopt;
    if (j <= 0 && !(is_integer(target.a) && is_integer(target.b))) return std::nullopt;
    const mpz_class p = floor_q(g.a), q0 = floor_q(g.b);
    const long long span = j <= 0 ? denominator(mpq_class(g.a * static_cast<long>(A.s))) : 1;
    for (long off = 0; off < span; ++off) {
        const mpq_class q = mpq_class(q0 + off);
        const mpq_class c_rem = g.c + mpq_class(p) * q - g.a * q;
        const mpq_class r = j >= 2 ? c_rem : mpq_class(floor_q(c_rem));
        if (!is_integer(r)) continue;
        HeisenbergElement gamma{mpq_class(p), q, r};
        HeisenbergElement alpha = g * gamma.inverse();
        if (preimage_membership(alpha, j, A) && alpha * gamma == g) return std::make_pair(alpha, gamma);
    }
    return std::nullopt;
}

bool coset_group_membership(const HeisenbergElement& g, int j, const Dilation& A) {
    return factor_lattice_right(g, j, A).has_value();
}

std::vector<HeisenbergElement> words_up_to(const std::vector<HeisenbergElement>& gens, int k) {
    const auto letters = with_inverses(gens);
    std::set<HeisenbergElement> seen{HeisenbergElement{}};
    std::vector<HeisenbergElement> frontier{HeisenbergElement{}};
    for (int len = 1; len <= k; ++len) {
        std::vector<HeisenbergElement> next;
        for (const auto& w : frontier)
            for (const auto& l : letters) {
                auto e = w * l;
                if (seen.insert(e).second) next.push_back(std::move(e));
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

std::vector<HeisenbergElement> lattice_generators() {
    return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
}

std::vector<HeisenbergElement> preimage_generators(int j, const Dilation& A) {
    std::vector<HeisenbergElement> out;
    if (j >= 2) return out;
    for (const auto& g : lattice_generators())
        if (lcs_membership(g, j)) out.push_back(A.inverse(g));
    return out;
}

LemmaSweep coset_commutation_sweep(int k, const Dilation& A) {
    if (k < 0 || k > 6) throw ConfigError("word length bound must lie in [0, 6]");
    LemmaSweep out;
    out.check = "coset_commutation";
    out.word_length = k;
    const auto gammas = words_up_to(lattice_generators(), k);
    for (int j = 0; j <= 2; ++j) {
        out.levels.push_back(j);
        const auto alphas = words_up_to(preimage_generators(j, A), k);
        sweep_pairs(alphas.size(), gammas.size(), out, [&](std::size_t i, std::size_t m) -> std::optional<LatticeCounterexample> {
            const auto& al = alphas[i];
            const auto& ga = gammas[m];
            if (!factor_lattice_left(al * ga, j, A))
                return make_counterexample(j, al, ga, "alpha gamma has no factorization gamma' alpha'");
            if (!factor_lattice_right(ga * al, j, A))
                return make_counterexample(j, al, ga, "gamma alpha has no factorization alpha' gamma'");
            return std::nullopt;
        });
        if (!out.pass) break;
    }
    return out;
}

LemmaSweep verify_coset_commutation(int k, const Dilation& A) {
    auto s = coset_commutation_sweep(k, A);
    if (!s.pass)
        throw CounterexampleFound("coset commutation fails for alpha = " + s.counterexample->first.to_string() +
                                  ", gamma = " + s.counterexample->second.to_string());
    return s;
}

LemmaSweep normality_sweep(const std::vector<HeisenbergElement>& conjugators,
                           const std::vector<HeisenbergElement>& elements,
                           const std::function<bool(const HeisenbergElement&)>& member) {
    LemmaSweep out;
    out.check = "normality";
    sweep_pairs(conjugators.size(), elements.size(), out, [&](std::size_t i, std::size_t m) -> std::optional<LatticeCounterexample> {
        const auto& g = conjugators[i];
        const auto& h = elements[m];
        if (!member(g * h * g.inverse())) return make_counterexample(0, g, h, "conjugate leaves the subgroup");
        return std::nullopt;
    });
    return out;
}

LemmaSweep normal_subgroup_sweep(int k, const Dilation& A) {
    if (k < 0 || k > 6) throw ConfigError("word length bound must lie in [0, 6]");
    LemmaSweep out;
    out.check = "normal_subgroup";
    out.word_length = k;
    for (int j = 0; j <= 2; ++j) {
        out.levels.push_back(j);
        auto big = preimage_generators(j, A);
        auto small = preimage_generators(j + 1, A);
        for (const auto& g : lattice_generators()) {
            big.push_back(g);
            small.push_back(g);
        }
        const auto conj = words_up_to(big, k);
        const auto elems = words_up_to(small, k);
        auto s = normality_sweep(conj, elems, [&](const HeisenbergElement& x) { return coset_group_membership(x, j + 1, A); });
        out.pairs_checked += s.pairs_checked;
        if (!s.pass) {
            out.pass = false;
            out.counterexample = s.counterexample;
            out.counterexample->j = j;
            break;
        }
    }
    return out;
}

LemmaSweep verify_normal_subgroup(int k, const Dilation& A) {
    auto s = normal_subgroup_sweep(k, A);
    if (!s.pass)
        throw CounterexampleFound("normality fails for conjugator " + s.counterexample->first.to_string() +
                                  " and element " + s.counterexample->second.to_string());
    return s;
}

nlohmann::json LemmaSweep::to_json() const {
    nlohmann::json j{{"check", check},
                     {"word_length", word_length},
                     {"levels", levels},
                     {"pairs_checked", pairs_checked},
                     {"pass", pass}};
    if (counterexample)
        j["counterexample"] = {{"j", counterexample->j},
                               {"first", counterexample->first.to_string()},
                               {"second", counterexample->second.to_string()},
                               {"reason", counterexample->reason}};
    return j;
}

bool dilation_is_lattice_endomorphism(const Dilation& A) {
    const auto gens = with_inverses(lattice_generators());
    for (const auto& g : gens) {
        if (!lcs_membership(A(g), 0)) return false;
        for (const auto& h : gens)
            if (!(A(g * h) == A(g) * A(h))) return false;
    }
    // spot check on non-integer elements too
    const HeisenbergElement u{mpq_class(1, 2), mpq_class(1, 3), mpq_class(1, 5)};
    const HeisenbergElement v{mpq_class(-2, 7), mpq_class(3, 4), mpq_class(1, 9)};
    return A(u * v) == A(u) * A(v);
}

RationalAffine RationalAffine::identity(int n) {
    RationalAffine r;
    r.matrix.assign(n, QVector(n, 0));
    for (int i = 0; i < n; ++i) r.matrix[i][i] = 1;
    r.translation.assign(n, 0);
    return r;
}

RationalAffine RationalAffine::compose(const RationalAffine& inner) const {
    const int n = dim();
    RationalAffine r;
    r.matrix.assign(n, QVector(n, 0));
    r.translation = translation;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            r.translation[i] += matrix[i][j] * inner.translation[j];
            for (int t = 0; t < n; ++t) r.matrix[i][j] += matrix[i][t] * inner.matrix[t][j];
        }
    return r;
}

RationalAffine RationalAffine::inverse() const {
    const int n = dim();
    QMatrix A = matrix;
    QMatrix inv = identity(n).matrix;
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && A[p][c] == 0) ++p;
        if (p == n) throw PreconditionViolation("affine map is not invertible");
        std::swap(A[c], A[p]);
        std::swap(inv[c], inv[p]);
        const mpq_class piv = A[c][c];
        for (int j = 0; j < n; ++j) {
            A[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for (int i = 0; i < n; ++i)
            if (i != c && A[i][c] != 0) {
                const mpq_class f = A[i][c];
                for (int j = 0; j < n; ++j) {
                    A[i][j] -= f * A[c][j];
                    inv[i][j] -= f * inv[c][j];
                }
            }
    }
    RationalAffine r;
    r.matrix = inv;
    r.translation.assign(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.translation[i] -= inv[i][j] * translation[j];
    return r;
}

bool RationalAffine::equal_mod_integers(const RationalAffine& o) const {
    if (matrix != o.matrix) return false;
    for (int i = 0; i < dim(); ++i)
        if (!is_integer(mpq_class(translation[i] - o.translation[i]))) return false;
    return true;
}

bool RationalAffine::operator==(const RationalAffine& o) const {
    return matrix == o.matrix && translation == o.translation;
}

bool RationalAffine::has_fixed_point_mod_integers() const {
    // M x + v = x + m  <=>  (M - I) x = m - v; solvable over R iff P (m - v) = 0 for
    // P spanning the left kernel of M - I.
    const int n = dim();
    QMatrix T(n, QVector(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) T[i][j] = matrix[j][i] - (i == j ? 1 : 0);
    const auto P = rational_kernel(T);
    if (P.empty()) return true;
    QVector t;
    for (const auto& row : P) {
        mpq_class s = 0;
        for (int j = 0; j < n; ++j) s += mpq_class(static_cast<long>(row[j])) * translation[j];
        t.push_back(s);
    }
    return integer_solvable(P, t);
}

bool RationalAffine::is_signed_diagonal_involution() const {
    const int n = dim();
    for (int i = 0; i < n; ++i) {
        int nonzero = 0;
        for (int j = 0; j < n; ++j) {
            if (matrix[i][j] == 0) continue;
            if (matrix[i][j] != 1 && matrix[i][j] != -1) return false;
            ++nonzero;
        }
        if (nonzero != 1) return false;
    }
    RationalAffine lin = *this;
    lin.translation.assign(n, 0);
    return lin.compose(lin).matrix == identity(n).matrix;
}

nlohmann::json RationalAffine::to_json() const {
    nlohmann::json m = nlohmann::json::array();
    for (const auto& row : matrix) m.push_back(qvec_json(row));
    return {{"matrix", m}, {"translation", qvec_json(translation)}};
}

RationalAffine linear_affine(const std::vector<std::vector<long long>>& M) {
    const int n = static_cast<int>(M.size());
    return make_affine(M, QVector(n, 0));
}

RationalAffine make_affine(const std::vector<std::vector<long long>>& M, const QVector& v) {
    RationalAffine r;
    for (const auto& row : M) {
        QVector qrow;
        for (long long x : row) qrow.emplace_back(static_cast<long>(x));
        r.matrix.push_back(qrow);
    }
    r.translation = v;
    return r;
}

std::vector<std::vector<long long>> infratorus_linear_part() { return {{0, 0, 3}, {1, 0, 0}, {0, 1, 0}}; }

std::vector<RationalAffine> infratorus_deck_group() {
    const mpq_class h(1, 2);
    return {RationalAffine::identity(3),
            make_affine({{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}, {h, 0, h}),
            make_affine({{-1, 0, 0}, {0, 1, 0}, {0, 0, -1}}, {h, h, 0}),
            make_affine({{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}}, {0, h, h})};
}

InfratorusReport infratorus_report() {
    InfratorusReport rep;
    const auto T = infratorus_deck_group();
    const int n = static_cast<int>(T.size());
    rep.closed = true;
    rep.composition_table.assign(n, std::vector<int>(n, -1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto c = T[i].compose(T[j]);
            for (int k = 0; k < n; ++k)
                if (c.equal_mod_integers(T[k])) rep.composition_table[i][j] = k;
            if (rep.composition_table[i][j] < 0) rep.closed = false;
        }
    for (int i = 1; i < n; ++i) {
        rep.freeness.push_back({"T" + std::to_string(i) + " has no fixed point", !T[i].has_fixed_point_mod_integers()});
        rep.holonomy.push_back({"gamma" + std::to_string(i) + " is a signed diagonal involution",
                                T[i].is_signed_diagonal_involution()});
    }
    const auto L = linear_affine(infratorus_linear_part());
    const auto Linv = L.inverse();
    auto shifted = [](RationalAffine a) {
        a.translation[0] += 1;
        return a;
    };
    rep.relations.push_back({"L T1 L^-1 = T2 + e1", L.compose(T[1]).compose(Linv) == shifted(T[2])});
    rep.relations.push_back({"L T2 L^-1 = T3", L.compose(T[2]).compose(Linv) == T[3]});
    rep.relations.push_back({"L T3 L^-1 = T1 + e1", L.compose(T[3]).compose(Linv) == shifted(T[1])});
    IntMatN Lm(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Lm(i, j) = infratorus_linear_part()[i][j];
    rep.linear_part_irreducible = irreducibility_test(Lm).irreducible;
    rep.pass = rep.closed;
    for (const auto* group : {&rep.freeness, &rep.relations, &rep.holonomy})
        for (const auto& r : *group) rep.pass = rep.pass && r.pass;
    return rep;
}

InfratorusReport infratorus_verify() {
    auto rep = infratorus_report();
    if (!rep.closed) throw VerificationFailure("deck group is not closed under composition");
    for (const auto* group : {&rep.freeness, &rep.relations, &rep.holonomy})
        for (const auto& r : *group)
            if (!r.pass) throw VerificationFailure("failed: " + r.name);
    return rep;
}

nlohmann::json InfratorusReport::to_json() const {
    auto checks = [](const std::vector<RelationCheck>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& r : v) a.push_back({{"name", r.name}, {"pass", r.pass}});
        return a;
    };
    nlohmann::json deck = nlohmann::json::array();
    for (const auto& t : infratorus_deck_group()) deck.push_back(t.to_json());
    return {{"pass", pass},
            {"closed", closed},
            {"composition_table", composition_table},
            {"freeness", checks(freeness)},
            {"relations", checks(relations)},
            {"holonomy", checks(holonomy)},
            {"linear_part", infratorus_linear_part()},
            {"linear_part_irreducible", linear_part_irreducible},
            {"deck_group", deck}};
}

KleinReport klein_report(const TrigPoly& alpha) {
    KleinReport rep;
    const auto L = linear_affine({{3, 0}, {0, 2}});
    const auto T = make_affine({{1, 0}, {0, -1}}, {mpq_class(1, 2), 0});
    const auto LT = L.compose(T), TL = T.compose(L);
    rep.linear_commutes = LT.equal_mod_integers(TL);
    for (int i = 0; i < 2; ++i) rep.linear_defect.push_back(LT.translation[i] - TL.translation[i]);
    rep.half_periodic = alpha.only_even_harmonics();
    if (!rep.half_periodic) {
        double best = -1.0;
        for (int j = 0; j < 64; ++j) {
            const double x = j / 64.0;
            const double gap = std::abs(alpha(x + 0.5) - alpha(x));
            if (gap > best + 1e-15) {
                best = gap;
                rep.witness = x;
            }
        }
    }
    const int g = 64;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const double x = static_cast<double>(i) / g, y = static_cast<double>(j) / g;
            const Vec fT = vec2(3 * (x + 0.5) + alpha(x + 0.5), -2 * y);
            const Vec Tf = vec2(3 * x + alpha(x) + 0.5, -2 * y);
            rep.commutation_defect = std::max(rep.commutation_defect, torus_distance(fT, Tf));
        }
    rep.fixes_origin = std::abs(alpha(0.0)) < 1e-15;
    rep.pass = rep.linear_commutes && rep.half_periodic && rep.commutation_defect < 1e-12;
    return rep;
}

KleinReport klein_verify(const TrigPoly& alpha) {
    auto rep = klein_report(alpha);
    if (!rep.linear_commutes) throw VerificationFailure("L does not commute with the involution mod Z^2");
    if (!rep.half_periodic)
        throw VerificationFailure("alpha is not 1/2-periodic; witness x = " + std::to_string(*rep.witness));
    if (!(rep.commutation_defect < 1e-12)) throw VerificationFailure("f does not commute with the involution");
    return rep;
}

nlohmann::json KleinReport::to_json() const {
    nlohmann::json j{{"pass", pass},
                     {"linear_commutes", linear_commutes},
                     {"linear_defect", qvec_json(linear_defect)},
                     {"half_periodic", half_periodic},
                     {"commutation_defect", commutation_defect},
                     {"fixes_origin", fixes_origin}};
    if (witness) j["witness"] = *witness;
    return j;
}

}  // namespace rigidlab
