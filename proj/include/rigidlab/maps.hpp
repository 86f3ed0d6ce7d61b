#pragma once

#include "rigidlab/linalg.hpp"
#include "rigidlab/trig_poly.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace rigidlab {

inline constexpr double kNewtonTol = 1e-12;
inline constexpr int kNewtonCap = 100;

/// Lower bound on the expansion of a map, certified on a grid with a
/// Lipschitz bound on the differential.
struct ExpansionCertificate {
    bool pass = false;
    double bound = 0.0;   ///< certified lower bound on min |Df v| / |v|
    double margin = 0.0;  ///< bound - 1
};

/// Degree-d circle map with lift F(x) = d x + alpha(x), optionally conjugated
/// by the circle diffeomorphism Phi(x) = x + s(x): the lift is then Phi o F o Phi^{-1}.
class CircleMap {
public:
    CircleMap(long long degree, TrigPoly alpha);
    CircleMap(long long degree, TrigPoly alpha, TrigPoly conjugator);

    long long degree() const { return d_; }
    const TrigPoly& alpha() const { return alpha_; }
    const TrigPoly& conjugator() const { return s_; }
    bool conjugated() const { return conjugated_; }

    double lift(double x) const;
    double derivative(double x) const;
    /// Global inverse of the lift on the real line.
    double inverse_lift(double x) const;
    /// Upper bound on sup |lift(x) - d x|.
    double perturbation_bound() const;
    /// Upper bound on sup |lift''|.
    double second_derivative_bound() const;
    ExpansionCertificate certificate() const { return cert_; }

    /// Phi and its inverse (identity when not conjugated).
    double phi(double x) const { return x + s_(x); }
    double phi_inverse(double x) const;

    nlohmann::json to_json() const;
    static CircleMap from_json(const nlohmann::json& j);

private:
    double base_lift(double z) const { return static_cast<double>(d_) * z + alpha_(z); }
    double base_inverse(double x) const;
    ExpansionCertificate compute_certificate() const;

    long long d_;
    TrigPoly alpha_;
    TrigPoly s_;
    bool conjugated_ = false;
    ExpansionCertificate cert_;
};

/// Expanding map of the circle or of the 2-torus.
class ExpandingMap {
public:
    enum class Kind { circle, product, skew, linear };

    static ExpandingMap circle(CircleMap m);
    static ExpandingMap circle(long long degree, TrigPoly alpha);
    static ExpandingMap product(CircleMap mx, CircleMap my);
    /// f(x, y) = (d x + alpha(y), a y).
    static ExpandingMap skew(long long d, long long a, TrigPoly alpha);
    static ExpandingMap linear(const IntMat& matrix);

    Kind kind() const { return kind_; }
    std::string kind_name() const;
    int dim() const { return kind_ == Kind::circle ? 1 : 2; }
    const IntMat& linear_part() const { return L_; }
    /// Number of preimages |det L|.
    long long degree() const { return deg_; }

    Vec lift(const Vec& x) const;
    Vec evaluate(const Vec& x) const { return wrap(lift(x)); }
    Mat differential(const Vec& x) const;
    double log_abs_jacobian(const Vec& x) const;
    /// Inverse of the lift on the universal cover.
    Vec inverse_lift(const Vec& x) const;
    /// Integer translates k_j naming the inverse branches y_j = G(x + k_j),
    /// one per coset of Z^n / L Z^n, in lexicographic order.
    const std::vector<IntVec>& branch_translates() const { return translates_; }
    /// All preimages of x, ordered by branch index, reduced to [0,1)^n.
    std::vector<Vec> inverse_branches(const Vec& x) const;
    /// lift(x) - L x, a periodic function.
    Vec perturbation(const Vec& x) const;
    /// Upper bound on the sup norm of the perturbation.
    double perturbation_bound() const;
    ExpansionCertificate expansion_certificate() const { return cert_; }
    /// Throws PreconditionViolation unless the certificate passes.
    void require_expanding() const;

    /// Factor accessors; valid for circle (x) and product (x, y) maps.
    const CircleMap& x_factor() const;
    const CircleMap& y_factor() const;
    /// Skew parameters.
    long long skew_d() const { return L_(0, 0); }
    long long skew_a() const { return L_(1, 1); }
    const TrigPoly& skew_alpha() const { return alpha_; }

    nlohmann::json to_json() const;
    static ExpandingMap from_json(const nlohmann::json& j);

private:
    ExpandingMap() = default;
    void finish();

    Kind kind_ = Kind::circle;
    IntMat L_;
    long long deg_ = 0;
    std::vector<CircleMap> factors_;
    TrigPoly alpha_;
    std::vector<IntVec> translates_;
    ExpansionCertificate cert_;
};

}  // namespace rigidlab
