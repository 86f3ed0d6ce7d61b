#pragma once

#include "rigidlab/exact.hpp"
#include "rigidlab/trig_poly.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rigidlab {

/// Element of the real Heisenberg group with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab').
struct HeisenbergElement {
    mpq_class a = 0, b = 0, c = 0;

    HeisenbergElement() = default;
    HeisenbergElement(mpq_class a_, mpq_class b_, mpq_class c_) : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {}

    HeisenbergElement operator*(const HeisenbergElement& o) const;
    HeisenbergElement inverse() const;
    bool operator==(const HeisenbergElement& o) const = default;
    bool operator<(const HeisenbergElement& o) const;
    std::string to_string() const;
};

HeisenbergElement commutator(const HeisenbergElement& g, const HeisenbergElement& h);

/// A(a,b,c) = (p a, q b, s c); a homomorphism exactly when s = p q.
struct Dilation {
    long long p = 2, q = 2, s = 4;
    HeisenbergElement operator()(const HeisenbergElement& g) const;
    HeisenbergElement inverse(const HeisenbergElement& g) const;
};

/// Membership in the j-th term of the lower central series of the integer lattice.
bool lcs_membership(const HeisenbergElement& g, int j);
/// Membership in A^{-1}(Gamma^j).
bool preimage_membership(const HeisenbergElement& g, int j, const Dilation& A = {});
/// Membership in A^{-1}(Gamma^j) . Gamma.
bool coset_group_membership(const HeisenbergElement& g, int j, const Dilation& A = {});

/// Distinct group elements expressible as words of length <= k in gens and their inverses.
std::vector<HeisenbergElement> words_up_to(const std::vector<HeisenbergElement>& gens, int k);
std::vector<HeisenbergElement> lattice_generators();
std::vector<HeisenbergElement> preimage_generators(int j, const Dilation& A = {});

struct LatticeCounterexample {
    int j = 0;
    HeisenbergElement first, second;
    std::string reason;
};

struct LemmaSweep {
    std::string check;
    int word_length = 0;
    std::vector<int> levels;
    long long pairs_checked = 0;
    bool pass = true;
    std::optional<LatticeCounterexample> counterexample;
    nlohmann::json to_json() const;
};

/// Factor g = gamma' alpha' with gamma' in Gamma and alpha' in A^{-1}(Gamma^j), if possible.
std::optional<std::pair<HeisenbergElement, HeisenbergElement>> factor_lattice_left(const HeisenbergElement& g, int j,
                                                                                    const Dilation& A = {});
/// Factor g = alpha' gamma' with alpha' in A^{-1}(Gamma^j) and gamma' in Gamma, if possible.
std::optional<std::pair<HeisenbergElement, HeisenbergElement>> factor_lattice_right(const HeisenbergElement& g, int j,
                                                                                     const Dilation& A = {});

/// Checks A^{-1}(Gamma^j) Gamma = Gamma A^{-1}(Gamma^j) on words of length <= k, j = 0, 1, 2.
LemmaSweep coset_commutation_sweep(int k, const Dilation& A = {});
/// As coset_commutation_sweep, throwing CounterexampleFound on failure.
LemmaSweep verify_coset_commutation(int k, const Dilation& A = {});

/// Checks that A^{-1}(Gamma^{j+1}) Gamma is normal in A^{-1}(Gamma^j) Gamma on words of length <= k.
LemmaSweep normal_subgroup_sweep(int k, const Dilation& A = {});
LemmaSweep verify_normal_subgroup(int k, const Dilation& A = {});

/// Generic normality check: g h g^{-1} stays in the subgroup for all listed pairs.
LemmaSweep normality_sweep(const std::vector<HeisenbergElement>& conjugators,
                           const std::vector<HeisenbergElement>& elements,
                           const std::function<bool(const HeisenbergElement&)>& member);

/// Checks A(g h) = A(g) A(h) on generator pairs and A(Gamma) in Gamma.
bool dilation_is_lattice_endomorphism(const Dilation& A);

/// x -> M x + v on R^n with exact rational data.
struct RationalAffine {
    QMatrix matrix;
    QVector translation;

    static RationalAffine identity(int n);
    int dim() const { return static_cast<int>(translation.size()); }
    RationalAffine compose(const RationalAffine& inner) const;  ///< this after inner
    RationalAffine inverse() const;
    /// Same linear part and translations differing by an integer vector.
    bool equal_mod_integers(const RationalAffine& o) const;
    bool operator==(const RationalAffine& o) const;
    /// Whether M x + v = x has a solution on R^n / Z^n.
    bool has_fixed_point_mod_integers() const;
    bool is_signed_diagonal_involution() const;
    nlohmann::json to_json() const;
};

RationalAffine linear_affine(const std::vector<std::vector<long long>>& M);
RationalAffine make_affine(const std::vector<std::vector<long long>>& M, const QVector& v);

struct RelationCheck {
    std::string name;
    bool pass = false;
};

struct InfratorusReport {
    bool closed = false;
    std::vector<std::vector<int>> composition_table;  ///< index of T_i o T_j, -1 if not in the group
    std::vector<RelationCheck> freeness;
    std::vector<RelationCheck> relations;
    std::vector<RelationCheck> holonomy;
    bool linear_part_irreducible = false;
    bool pass = false;
    nlohmann::json to_json() const;
};

/// Deck group data of the three-dimensional infratorus with L the companion matrix of x^3 - 3.
std::vector<RationalAffine> infratorus_deck_group();
std::vector<std::vector<long long>> infratorus_linear_part();
InfratorusReport infratorus_report();
/// As infratorus_report, throwing VerificationFailure naming the first failed relation.
InfratorusReport infratorus_verify();

struct KleinReport {
    bool linear_commutes = false;
    QVector linear_defect;  ///< L T - T L evaluated on translations
    bool half_periodic = false;
    std::optional<double> witness;  ///< x with alpha(x + 1/2) != alpha(x)
    double commutation_defect = 0.0;  ///< max distance mod Z^2 between f T and T f on a grid
    bool fixes_origin = false;  ///< alpha(0) = 0
    bool pass = false;
    nlohmann::json to_json() const;
};

KleinReport klein_report(const TrigPoly& alpha);
KleinReport klein_verify(const TrigPoly& alpha);

}  // namespace rigidlab
