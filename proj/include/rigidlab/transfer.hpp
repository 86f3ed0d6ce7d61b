#pragma once

#include "rigidlab/grid.hpp"
#include "rigidlab/maps.hpp"
#include "rigidlab/periodic.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace rigidlab {

inline constexpr double kEigTol = 1e-10;
inline constexpr int kDefaultResolution1D = 1024;
inline constexpr int kDefaultResolution2D = 128;

/// Preimages of every grid node with their spline stencils.
class TransferPlan {
public:
    TransferPlan(const ExpandingMap& f, int resolution);

    int dim() const { return dim_; }
    int resolution() const { return n_; }
    std::size_t nodes() const { return nodes_; }
    std::size_t branches() const { return branches_; }
    const Vec& preimage(std::size_t node, std::size_t b) const { return pre_[node * branches_ + b]; }
    const GridFunction::Stencil* stencil(std::size_t node, std::size_t b) const {
        return &stencils_[(node * branches_ + b) * 2];
    }
    /// Values of g at every preimage, laid out node-major.
    std::vector<double> at_preimages(const GridFunction& g) const;

private:
    int dim_;
    int n_;
    std::size_t nodes_;
    std::size_t branches_;
    std::vector<Vec> pre_;
    std::vector<GridFunction::Stencil> stencils_;
};

/// (L_phi v)(x) = sum over f(y) = x of e^{phi(y)} v(y) at every grid node.
GridFunction apply_transfer(const ExpandingMap& f, const GridFunction& phi, const GridFunction& v);
GridFunction apply_transfer(const TransferPlan& plan, const GridFunction& phi, const GridFunction& v);

struct EigenOptions {
    double eig_tol = kEigTol;
    int max_iterations = 20000;
    std::optional<GridFunction> initial_u;  ///< starting log-eigenfunction
};

/// Leading eigenvalue e^c and eigenfunction e^u of L_phi, with max u = 0.
struct EigenData {
    double c = 0.0;
    GridFunction u;
    double residual = 0.0;  ///< sup |L_phi e^u - e^{c+u}| over the grid
    int iterations = 0;
    double eig_tol = kEigTol;

    nlohmann::json to_json(bool include_values = true) const;
};

EigenData leading_eigendata(const ExpandingMap& f, const GridFunction& phi, const EigenOptions& opt = {});
EigenData leading_eigendata(const TransferPlan& plan, const GridFunction& phi, const EigenOptions& opt = {});

/// phi_hat = phi - c + u - u o f, which satisfies L_{phi_hat} 1 = 1.
struct NormalizedPotential {
    GridFunction phi_hat;
    double c = 0.0;
    GridFunction u;
    double eigen_residual = 0.0;
    double normalization_residual = 0.0;  ///< sup |L_{phi_hat} 1 - 1|
    double eig_tol = kEigTol;

    nlohmann::json to_json(bool include_values = true) const;
};

NormalizedPotential normalize_potential(const ExpandingMap& f, const GridFunction& phi,
                                        const EigenOptions& opt = {});
NormalizedPotential normalize_potential(const ExpandingMap& f, const TransferPlan& plan,
                                        const GridFunction& phi, const EigenOptions& opt = {});

/// sup over the grid of |L_{phi_hat} 1 - 1|.
double normalization_residual(const TransferPlan& plan, const GridFunction& phi_hat);

/// (1/n) log sum over Fix(f^n) of exp(S_n phi).
double pressure_via_periodic_orbits(const ExpandingMap& f, const ScalarField& phi, int n,
                                    long long cap = kEnumerationCap);

}  // namespace rigidlab
