#pragma once

#include "rigidlab/grid.hpp"
#include "rigidlab/maps.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace rigidlab {

inline constexpr double kConjTol = 1e-8;
inline constexpr double kKernelTol = 1e-4;
inline constexpr double kTruncationTol = 1e-12;

/// Pointwise evaluator of a conjugacy, represented on the universal cover.
class ConjugacyEvaluator {
public:
    using LiftFn = std::function<Vec(const Vec&)>;

    ConjugacyEvaluator(int dim, LiftFn lift, int n_terms);
    static ConjugacyEvaluator identity(int dim);

    int dim() const { return dim_; }
    /// h on the cover; h(x + v) = h(x) + v for integer v.
    Vec lift(const Vec& x) const { return (*lift_)(x); }
    /// h on the torus, reduced to [0,1)^n.
    Vec operator()(const Vec& x) const { return wrap(lift(x)); }
    int n_terms() const { return n_terms_; }
    double residual() const { return residual_; }
    void set_residual(double r) { residual_ = r; }

    nlohmann::json to_json() const;
    /// Values of h (one column per coordinate) on a uniform grid, flagged as Holder data.
    std::string snapshot_csv(int resolution) const;

private:
    int dim_;
    std::shared_ptr<const LiftFn> lift_;
    int n_terms_;
    double residual_ = 0.0;
};

struct ConjugacyOptions {
    double truncation_tol = kTruncationTol;
    int residual_resolution = 0;  ///< nodes per axis; 0 picks 1024 (1-D) or 64 (2-D)
};

/// h with h o f = L o h, h fixing the marked fixed point 0.
ConjugacyEvaluator linearize(const ExpandingMap& f, const ConjugacyOptions& opt = {});
/// k = h^{-1} with k o L = f o k.
ConjugacyEvaluator delinearize(const ExpandingMap& f, const ConjugacyOptions& opt = {});
/// h = k2 o h1 with h o f1 = f2 o h.
ConjugacyEvaluator conjugacy_between(const ExpandingMap& f1, const ExpandingMap& f2,
                                     const ConjugacyOptions& opt = {});

/// sup over a uniform grid of the torus distance between h(f1 x) and f2(h x).
double conjugation_residual(const ConjugacyEvaluator& h, const ExpandingMap& f1, const ExpandingMap& f2,
                            int resolution);
/// Same with f2 replaced by the linear part of f1 (for linearizations).
double conjugation_residual_linear(const ConjugacyEvaluator& h, const ExpandingMap& f, int resolution);
/// sup |k(h x) - x| on a uniform grid.
double composition_residual(const ConjugacyEvaluator& k, const ConjugacyEvaluator& h, int resolution);
/// True when the 1-D lift is strictly increasing on a uniform grid.
bool lift_is_increasing(const ConjugacyEvaluator& h, int resolution);

/// Slope of log h(2^{-j}) against log 2^{-j} over j_min..j_max, for the linearization
/// h of a circle map g with g(0) = 0. Uses h(x) = h(g^m x) / d^m to stay accurate near 0.
double local_scaling_exponent(const CircleMap& g, int j_min = 20, int j_max = 45);

/// Numerical kernel of stacked potential gradients at every grid node.
struct FiberReport {
    int dim = 0;
    int resolution = 0;
    int min_dimension = 0;                     ///< m: minimum kernel dimension over nodes
    std::vector<int> dimensions;               ///< per node
    std::vector<std::vector<Vec>> bases;       ///< per node kernel basis
    double kernel_tol = kKernelTol;
    bool empty_family = false;

    /// Fraction of nodes whose kernel is exactly span{direction} (up to angle_tol).
    double fraction_spanned_by(const Vec& direction, double angle_tol = 1e-6) const;
    nlohmann::json to_json(bool per_node = true) const;
    std::string to_csv() const;
};

/// Kernel of the stacked gradients of the given functions (all on the same grid).
/// With an empty family the whole tangent space is reported at `resolution` nodes.
FiberReport fiber_direction_estimate(const std::vector<GridFunction>& potentials, int dim, int resolution,
                                     double kernel_tol = kKernelTol);

}  // namespace rigidlab
