#pragma once

#include <json.hpp>

#include <vector>

namespace rigidlab {

/// Real trigonometric polynomial of period 1:
///   p(x) = c0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x),  k >= 1.
/// cos_coeffs[k-1] holds a_k and sin_coeffs[k-1] holds b_k.
class TrigPoly {
public:
    TrigPoly() = default;
    TrigPoly(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs, double constant = 0.0);

    static TrigPoly cosine(int k, double amplitude = 1.0);
    static TrigPoly sine(int k, double amplitude = 1.0);

    double operator()(double x) const { return derivative(x, 0); }
    /// j-th derivative at x (j = 0 is the value).
    double derivative(double x, int j) const;
    /// Upper bound on sup |p^(j)| from the coefficients.
    double sup_bound(int j) const;

    int degree() const;
    bool is_zero() const;
    /// True when every nonzero harmonic is even, i.e. p(x + 1/2) = p(x).
    bool only_even_harmonics() const;

    double constant() const { return c0_; }
    const std::vector<double>& cos_coeffs() const { return a_; }
    const std::vector<double>& sin_coeffs() const { return b_; }

    TrigPoly operator+(const TrigPoly& other) const;
    TrigPoly operator*(double s) const;

    nlohmann::json to_json() const;
    /// Reads {cos_coeffs, sin_coeffs, constant?}; missing arrays mean zero.
    static TrigPoly from_json(const nlohmann::json& j);

private:
    std::vector<double> a_, b_;
    double c0_ = 0.0;
};

}  // namespace rigidlab
