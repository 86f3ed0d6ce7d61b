#pragma once

#include "rigidlab/conjugacy.hpp"
#include "rigidlab/periodic.hpp"
#include "rigidlab/transfer.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace rigidlab {

inline constexpr double kMatchTol = 1e-9;  ///< per unit of orbit period
inline constexpr double kCohTol = 1e-7;

enum class Verdict { equivalent, not_equivalent, inconclusive };
std::string to_string(Verdict v);

struct OrbitComparison {
    int period = 0;
    std::string code;
    Vec point1, point2;
    double sum1 = 0.0, sum2 = 0.0;
    double discrepancy = 0.0;
};

struct EquivalenceReport {
    int max_period_checked = 0;
    double max_discrepancy = 0.0;
    Verdict verdict = Verdict::inconclusive;
    int first_mismatch_period = 0;  ///< 0 when none
    double match_tol = kMatchTol;
    std::vector<OrbitComparison> orbits;

    nlohmann::json to_json(bool per_orbit = true) const;
};

struct EquivalenceOptions {
    double match_tol = kMatchTol;      ///< tolerance is match_tol * period
    double pairing_tol = kConjTol;
    bool verify_conjugacy = true;
    long long cap = kEnumerationCap;
};

/// Compare Birkhoff sums of phi1 over f1-orbits with phi2 over the f2-orbits through h.
EquivalenceReport check_equivalence(const ExpandingMap& f1, const ScalarField& phi1, const ExpandingMap& f2,
                                    const ScalarField& phi2, const ConjugacyEvaluator& h, int n_max,
                                    const EquivalenceOptions& opt = {});

/// Periodic sums of psi for a single map (psi against zero with h = id).
EquivalenceReport periodic_obstruction(const ExpandingMap& f, const ScalarField& psi, int n_max,
                                       const EquivalenceOptions& opt = {});

struct CohomologyOptions {
    int resolution = 0;              ///< 0 picks 2048 (1-D) or 128 (2-D)
    double coh_tol = kCohTol;
    int precondition_period = 6;
    double precondition_tol = kMatchTol;  ///< per unit of period
    int max_terms = 2000;
};

struct CohomologySolution {
    GridFunction u;         ///< u o f - u = psi, u(x0) = 0
    Vec marked_point;       ///< x0
    double residual = 0.0;  ///< sup |u o f - u - psi| on the grid
    double mean = 0.0;      ///< invariant-measure average of psi
    int terms = 0;
    double coh_tol = kCohTol;

    nlohmann::json to_json(bool include_values = true) const;
};

/// Solve u o f - u = psi by the series sum_{k>=1} L^k (psi - m(psi)) for the entropy normalization.
/// Throws SeriesStall when a periodic sum of psi is nonzero or the residual exceeds coh_tol.
CohomologySolution solve_cohomological_equation(const ExpandingMap& f, const ScalarField& psi,
                                                const CohomologyOptions& opt = {});

struct MatchedPotentials {
    double discrepancy = 0.0;  ///< sup over the grid of |phi_hat2(h x) - phi_hat1(x)|
    NormalizedPotential first, second;
    nlohmann::json to_json() const;
};

/// Normalize both potentials and compare phi_hat2 o h with phi_hat1 at the grid nodes of f1.
MatchedPotentials matched_normalized_potentials(const ExpandingMap& f1, const ScalarField& phi1,
                                                const ExpandingMap& f2, const ScalarField& phi2,
                                                const ConjugacyEvaluator& h, int resolution,
                                                const EigenOptions& eig = {});

}  // namespace rigidlab
