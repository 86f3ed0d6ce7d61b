#pragma once

#include "rigidlab/cohomology.hpp"
#include "rigidlab/conjugacy.hpp"
#include "rigidlab/periodic.hpp"

#include <json.hpp>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace rigidlab {

inline constexpr double kEigMatchTol = 1e-6;
inline constexpr double kMmeTol = 1e-6;

/// Compare log|Jac f1^n| at f1-periodic points with log|Jac f2^n| at their images under h.
EquivalenceReport jacobian_data_match(const ExpandingMap& f1, const ExpandingMap& f2, const ConjugacyEvaluator& h,
                                      int n_max, const EquivalenceOptions& opt = {});

/// Eigenvalues of the m-th exterior power: products over m-element subsets.
std::vector<std::complex<double>> exterior_power_eigenvalues(const Mat& d, int m);

/// True when some eigenvalue of the m-th exterior power of the period-n differential
/// equals lambda^n, compared on the (1/n) log scale.
bool has_power_eigenvalue(const PeriodicOrbit& orbit, int m, long long lambda, double tol = kEigMatchTol);

struct PowerWitness {
    int m = 0;
    long long lambda = 0;
    bool certified = false;
    int period = 0;         ///< witness orbit period
    std::string code;       ///< witness orbit code
    Vec point;              ///< witness base point
};

struct NonAlgebraicCertificate {
    int n_max = 0;
    bool certified = false;
    std::vector<PowerWitness> entries;
    std::optional<PowerWitness> first_failure;
    double eig_match_tol = kEigMatchTol;
    nlohmann::json to_json() const;
};

struct NonAlgebraicOptions {
    /// Per-m candidate sets (index m-1). Empty means integers with |lambda| <= spectral
    /// radius of the m-th exterior power of the linear part.
    std::vector<std::vector<long long>> lambda_sets;
    /// Restrict to integer eigenvalues of the exterior powers of the linear part.
    bool integer_eigenvalues_only = false;
    double eig_match_tol = kEigMatchTol;
    long long cap = kEnumerationCap;
};

NonAlgebraicCertificate very_non_algebraic_certify(const ExpandingMap& f, int n_max,
                                                    const NonAlgebraicOptions& opt = {});
/// Same search over an explicit orbit list.
NonAlgebraicCertificate very_non_algebraic_certify(const std::vector<PeriodicOrbit>& orbits, int dim,
                                                    const std::vector<std::vector<long long>>& lambda_sets,
                                                    int n_max, double tol = kEigMatchTol);
/// Default candidate sets for f (see NonAlgebraicOptions).
std::vector<std::vector<long long>> default_lambda_sets(const IntMat& L, bool integer_eigenvalues_only);

struct SpectrumComparison {
    bool pass = false;         ///< true when no exterior power shares a real eigenvalue
    int shared_m = 0;
    double shared_exponent = 0.0;
    nlohmann::json to_json() const;
};

SpectrumComparison disjoint_spectrum_test(const PeriodicOrbit& x, const PeriodicOrbit& y,
                                          double tol = kEigMatchTol);

struct CriticalRegularity {
    double r0_minmax = 0.0;
    double r0_periodic = 0.0;
    double gap = 0.0;  ///< r0_minmax - r0_periodic
    int argmin_n = 0;
    nlohmann::json to_json() const;
};

/// min_n max_x log|Df^n| / log m(Df^n) over a grid, and max over orbits of the ratio
/// of extreme Lyapunov exponents.
CriticalRegularity critical_regularity(const ExpandingMap& f, int n_max = 8, int p_max = 10, int grid = 0,
                                       long long cap = kEnumerationCap);

using IntMatN = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct IrreducibilityResult {
    bool irreducible = false;
    std::vector<long long> char_poly;               ///< monic, highest degree first
    std::vector<long long> factor;                  ///< rational factor found, highest degree first
    std::vector<std::vector<long long>> subspace;   ///< integer basis of an invariant rational subspace
    nlohmann::json to_json() const;
};

std::vector<long long> characteristic_polynomial(const IntMatN& L);
IrreducibilityResult irreducibility_test(const IntMatN& L);

struct MmeResult {
    bool pass = false;  ///< true when two orbits have different per-period log-Jacobian averages
    double spread = 0.0;
    std::string low_code, high_code;
    int low_period = 0, high_period = 0;
    double low_average = 0.0, high_average = 0.0;
    double mme_tol = kMmeTol;
    nlohmann::json to_json() const;
};

MmeResult mme_not_lebesgue_test(const ExpandingMap& f, int n_max, double tol = kMmeTol,
                                long long cap = kEnumerationCap);

/// Factor map T^2 -> S^1 for a skew or product map onto a circle map with the same
/// vertical degree: linearize the vertical factor, then delinearize f2.
ConjugacyEvaluator factor_map(const ExpandingMap& f1, const ExpandingMap& f2);

struct FactorReport {
    EquivalenceReport comparison;  ///< sum1 = quotient Jacobian sum, sum2 = base Jacobian sum
    double semiconjugacy_residual = 0.0;
    nlohmann::json to_json() const;
};

/// Compare Birkhoff sums of log|Jac f1| - log|d_x f1_x| with log|f2'| sums at the paired base orbit.
FactorReport factor_data_check(const ExpandingMap& f1, const ExpandingMap& f2, const ConjugacyEvaluator& h,
                               int n_max, double match_tol = kMatchTol);

struct RigidityVerdict {
    EquivalenceReport jacobian_match;
    NonAlgebraicCertificate non_algebraic;
    std::optional<std::pair<PeriodicOrbit, PeriodicOrbit>> disjoint_pair;
    std::optional<IrreducibilityResult> irreducibility;
    std::optional<MmeResult> mme;
    double conjugacy_residual = 0.0;
    std::string conclusion;
    int exit_code = 3;  ///< 0 certified, 2 mismatch, 3 inconclusive
    nlohmann::json to_json() const;
};

struct RigidityOptions {
    double match_tol = kMatchTol;
    double eig_match_tol = kEigMatchTol;
    double mme_tol = kMmeTol;
};

RigidityVerdict rigidity_check(const ExpandingMap& f1, const ExpandingMap& f2, int n_max = 6,
                               const RigidityOptions& opt = {});

}  // namespace rigidlab
