#include "rigidlab/trig_poly.hpp"

#include "rigidlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rigidlab {

TrigPoly::TrigPoly(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs, double constant)
    : a_(std::move(cos_coeffs)), b_(std::move(sin_coeffs)), c0_(constant) {
    std::size_t n = std::max(a_.size(), b_.size());
    a_.resize(n, 0.0);
    b_.resize(n, 0.0);
    for (double v : a_)
        if (!std::isfinite(v)) throw InvalidMap("non-finite trigonometric coefficient");
    for (double v : b_)
        if (!std::isfinite(v)) throw InvalidMap("non-finite trigonometric coefficient");
    while (!a_.empty() && a_.back() == 0.0 && b_.back() == 0.0) {
        a_.pop_back();
        b_.pop_back();
    }
}

TrigPoly TrigPoly::cosine(int k, double amplitude) {
    std::vector<double> a(k, 0.0);
    a[k - 1] = amplitude;
    return TrigPoly(a, {});
}

TrigPoly TrigPoly::sine(int k, double amplitude) {
    std::vector<double> b(k, 0.0);
    b[k - 1] = amplitude;
    return TrigPoly({}, b);
}

double TrigPoly::derivative(double x, int j) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double s = (j == 0) ? c0_ : 0.0;
    const double xr = x - std::floor(x);
    for (std::size_t i = 0; i < a_.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        double t = k * xr;
        t -= std::floor(t);
        const double theta = two_pi * t;
        double c = std::cos(theta), sn = std::sin(theta);
        // d^j/dx^j cos = (2 pi k)^j cos(theta + j pi/2), same shift for sin
        double dc, ds;
        switch (j % 4) {
            case 0: dc = c; ds = sn; break;
            case 1: dc = -sn; ds = c; break;
            case 2: dc = -c; ds = -sn; break;
            default: dc = sn; ds = -c; break;
        }
        s += std::pow(two_pi * k, j) * (a_[i] * dc + b_[i] * ds);
    }
    return s;
}

double TrigPoly::sup_bound(int j) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double s = (j == 0) ? std::abs(c0_) : 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i)
        s += std::pow(two_pi * static_cast<double>(i + 1), j) * std::hypot(a_[i], b_[i]);
    return s;
}

int TrigPoly::degree() const { return static_cast<int>(a_.size()); }

bool TrigPoly::is_zero() const { return a_.empty() && c0_ == 0.0; }

bool TrigPoly::only_even_harmonics() const {
    for (std::size_t i = 0; i < a_.size(); i += 2)
        if (a_[i] != 0.0 || b_[i] != 0.0) return false;
    return true;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
    std::size_t n = std::max(a_.size(), o.a_.size());
    std::vector<double> a(n, 0.0), b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < a_.size()) { a[i] += a_[i]; b[i] += b_[i]; }
        if (i < o.a_.size()) { a[i] += o.a_[i]; b[i] += o.b_[i]; }
    }
    return TrigPoly(a, b, c0_ + o.c0_);
}

TrigPoly TrigPoly::operator*(double s) const {
    std::vector<double> a = a_, b = b_;
    for (auto& v : a) v *= s;
    for (auto& v : b) v *= s;
    return TrigPoly(a, b, c0_ * s);
}

nlohmann::json TrigPoly::to_json() const {
    nlohmann::json j;
    j["cos_coeffs"] = a_;
    j["sin_coeffs"] = b_;
    if (c0_ != 0.0) j["constant"] = c0_;
    return j;
}

TrigPoly TrigPoly::from_json(const nlohmann::json& j) {
    std::vector<double> a, b;
    double c = 0.0;
    if (j.contains("cos_coeffs")) a = j.at("cos_coeffs").get<std::vector<double>>();
    if (j.contains("sin_coeffs")) b = j.at("sin_coeffs").get<std::vector<double>>();
    if (j.contains("constant")) c = j.at("constant").get<double>();
    return TrigPoly(a, b, c);
}

}  // namespace rigidlab
