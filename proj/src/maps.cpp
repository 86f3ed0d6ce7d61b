#include "rigidlab/maps.hpp"

#include "rigidlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rigidlab {

namespace {

constexpr int kCertificateGrid = 1 << 16;

/// Safeguarded Newton for a strictly monotone function g on [lo, hi] with g(lo), g(hi)
/// bracketing the target.
template <class F, class DF>
double monotone_solve(F&& g, DF&& dg, double target, double lo, double hi, double start) {
    if (lo > hi) std::swap(lo, hi);
    const bool increasing = g(hi) >= g(lo);
    double y = std::clamp(start, lo, hi);
    for (int it = 0; it < kNewtonCap; ++it) {
        const double r = g(y) - target;
        if (r == 0.0) return y;
        if ((r > 0) == increasing) hi = y; else lo = y;
        double next = y - r / dg(y);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - y) <= 2e-16 * std::max(1.0, std::abs(y))) {
            y = next;
            break;
        }
        y = next;
    }
    const double res = std::abs(g(y) - target);
    if (!(res < kNewtonTol * std::max(1.0, std::abs(target))))
        throw NewtonDivergence("inverse lift residual " + std::to_string(res) + " at target " +
                               std::to_string(target));
    return y;
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("map description must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in map description");
    }
}

}  // namespace

CircleMap::CircleMap(long long degree, TrigPoly alpha) : d_(degree), alpha_(std::move(alpha)) {
    if (std::llabs(d_) < 2) throw InvalidMap("circle map degree must satisfy |d| >= 2");
    if (alpha_.constant() != 0.0) throw InvalidMap("perturbation constant term must be zero");
    cert_ = compute_certificate();
}

CircleMap::CircleMap(long long degree, TrigPoly alpha, TrigPoly conjugator)
    : d_(degree), alpha_(std::move(alpha)), s_(std::move(conjugator)), conjugated_(!s_.is_zero()) {
    if (std::llabs(d_) < 2) throw InvalidMap("circle map degree must satisfy |d| >= 2");
    if (alpha_.constant() != 0.0) throw InvalidMap("perturbation constant term must be zero");
    if (s_.sup_bound(1) >= 1.0) throw InvalidMap("conjugator x + s(x) is not a diffeomorphism");
    cert_ = compute_certificate();
}

double CircleMap::phi_inverse(double x) const {
    if (!conjugated_) return x;
    const double b = s_.sup_bound(0);
    return monotone_solve([&](double z) { return z + s_(z); },
                          [&](double z) { return 1.0 + s_.derivative(z, 1); }, x, x - b - 1e-12,
                          x + b + 1e-12, x);
}

double CircleMap::base_inverse(double x) const {
    const double dd = static_cast<double>(d_);
    const double b = alpha_.sup_bound(0);
    return monotone_solve([&](double z) { return base_lift(z); },
                          [&](double z) { return dd + alpha_.derivative(z, 1); }, x,
                          (x - b) / dd - 1e-12, (x + b) / dd + 1e-12, x / dd);
}

double CircleMap::lift(double x) const {
    if (!conjugated_) return base_lift(x);
    return phi(base_lift(phi_inverse(x)));
}

double CircleMap::derivative(double x) const {
    const double dd = static_cast<double>(d_);
    if (!conjugated_) return dd + alpha_.derivative(x, 1);
    const double z = phi_inverse(x);
    const double fz = base_lift(z);
    return (1.0 + s_.derivative(fz, 1)) * (dd + alpha_.derivative(z, 1)) / (1.0 + s_.derivative(z, 1));
}

double CircleMap::inverse_lift(double x) const {
    if (!conjugated_) return base_inverse(x);
    return phi(base_inverse(phi_inverse(x)));
}

double CircleMap::perturbation_bound() const {
    if (!conjugated_) return alpha_.sup_bound(0);
    // Phi(F(z)) - d Phi(z) = s(F z) + alpha(z) - d s(z)
    return s_.sup_bound(0) * (1.0 + std::abs(static_cast<double>(d_))) + alpha_.sup_bound(0);
}

double CircleMap::second_derivative_bound() const {
    const double a2 = alpha_.sup_bound(2);
    if (!conjugated_) return a2;
    const double d1 = std::abs(static_cast<double>(d_)) + alpha_.sup_bound(1);
    const double s1 = s_.sup_bound(1), s2 = s_.sup_bound(2);
    const double m1 = 1.0 - s1, M1 = 1.0 + s1;
    // derivative in z of Phi'(F z) F'(z) / Phi'(z), divided by dx/dz = Phi'(z)
    const double dz = s2 * d1 * d1 / m1 + M1 * a2 / m1 + M1 * d1 * s2 / (m1 * m1);
    return dz / m1;
}

ExpansionCertificate CircleMap::compute_certificate() const {
    const double dd = static_cast<double>(d_);
    double lip;
    double mn = std::numeric_limits<double>::infinity();
    if (!conjugated_) {
        lip = alpha_.sup_bound(2);
        for (int i = 0; i < kCertificateGrid; ++i) {
            const double x = static_cast<double>(i) / kCertificateGrid;
            mn = std::min(mn, std::abs(dd + alpha_.derivative(x, 1)));
        }
    } else {
        // Sample in the z = Phi^{-1}(x) variable; the derivative is a function of z.
        const double d1 = std::abs(dd) + alpha_.sup_bound(1);
        const double a2 = alpha_.sup_bound(2);
        const double s1 = s_.sup_bound(1), s2 = s_.sup_bound(2);
        const double m1 = 1.0 - s1, M1 = 1.0 + s1;
        lip = s2 * d1 * d1 / m1 + M1 * a2 / m1 + M1 * d1 * s2 / (m1 * m1);
        for (int i = 0; i < kCertificateGrid; ++i) {
            const double z = static_cast<double>(i) / kCertificateGrid;
            const double v = (1.0 + s_.derivative(base_lift(z), 1)) * (dd + alpha_.derivative(z, 1)) /
                             (1.0 + s_.derivative(z, 1));
            mn = std::min(mn, std::abs(v));
        }
    }
    ExpansionCertificate c;
    c.bound = mn - lip * 0.5 / kCertificateGrid;
    c.margin = c.bound - 1.0;
    c.pass = c.bound > 1.0;
    return c;
}

nlohmann::json CircleMap::to_json() const {
    nlohmann::json j = alpha_.to_json();
    j["kind"] = "circle";
    j["degree"] = d_;
    if (conjugated_) j["conjugator"] = s_.to_json();
    return j;
}

CircleMap CircleMap::from_json(const nlohmann::json& j) {
    check_keys(j, {"kind", "degree", "cos_coeffs", "sin_coeffs", "conjugator"});
    if (!j.contains("degree")) throw ConfigError("circle map requires 'degree'");
    const long long d = j.at("degree").get<long long>();
    TrigPoly alpha = TrigPoly::from_json(j);
    if (j.contains("conjugator")) {
        check_keys(j.at("conjugator"), {"cos_coeffs", "sin_coeffs"});
        return CircleMap(d, alpha, TrigPoly::from_json(j.at("conjugator")));
    }
    return CircleMap(d, alpha);
}

ExpandingMap ExpandingMap::circle(CircleMap m) {
    ExpandingMap f;
    f.kind_ = Kind::circle;
    f.L_ = IntMat::Constant(1, 1, m.degree());
    f.factors_.push_back(std::move(m));
    f.finish();
    return f;
}

ExpandingMap ExpandingMap::circle(long long degree, TrigPoly alpha) {
    return circle(CircleMap(degree, std::move(alpha)));
}

ExpandingMap ExpandingMap::product(CircleMap mx, CircleMap my) {
    ExpandingMap f;
    f.kind_ = Kind::product;
    f.L_ = IntMat::Zero(2, 2);
    f.L_(0, 0) = mx.degree();
    f.L_(1, 1) = my.degree();
    f.factors_.push_back(std::move(mx));
    f.factors_.push_back(std::move(my));
    f.finish();
    return f;
}

ExpandingMap ExpandingMap::skew(long long d, long long a, TrigPoly alpha) {
    if (std::llabs(d) < 2 || std::llabs(a) < 2) throw InvalidMap("skew map requires |d|, |a| >= 2");
    if (alpha.constant() != 0.0) throw InvalidMap("perturbation constant term must be zero");
    ExpandingMap f;
    f.kind_ = Kind::skew;
    f.L_ = IntMat::Zero(2, 2);
    f.L_(0, 0) = d;
    f.L_(1, 1) = a;
    f.alpha_ = std::move(alpha);
    f.finish();
    return f;
}

ExpandingMap ExpandingMap::linear(const IntMat& matrix) {
    if (matrix.rows() != 2 || matrix.cols() != 2) throw InvalidMap("linear torus map must be 2x2");
    ExpandingMap f;
    f.kind_ = Kind::linear;
    f.L_ = matrix;
    f.finish();
    return f;
}

void ExpandingMap::finish() {
    const int n = dim();
    if (n == 1) {
        deg_ = std::llabs(L_(0, 0));
        for (long long k = 0; k < deg_; ++k) translates_.push_back(IntVec::Constant(1, k));
    } else {
        const long long det = L_(0, 0) * L_(1, 1) - L_(0, 1) * L_(1, 0);
        deg_ = std::llabs(det);
        if (deg_ < 2) throw InvalidMap("linear part must satisfy |det| >= 2");
        // k is a coset representative iff L^{-1} k lies in [0,1)^2, i.e. 0 <= adj(L) k / det < 1.
        long long lo[2], hi[2];
        for (int r = 0; r < 2; ++r) {
            lo[r] = std::min(0LL, L_(r, 0)) + std::min(0LL, L_(r, 1));
            hi[r] = std::max(0LL, L_(r, 0)) + std::max(0LL, L_(r, 1));
        }
        for (long long i = lo[0]; i <= hi[0]; ++i)
            for (long long j = lo[1]; j <= hi[1]; ++j) {
                long long u = L_(1, 1) * i - L_(0, 1) * j;
                long long v = -L_(1, 0) * i + L_(0, 0) * j;
                if (det < 0) { u = -u; v = -v; }
                if (u >= 0 && u < deg_ && v >= 0 && v < deg_) {
                    IntVec k(2);
                    k << i, j;
                    translates_.push_back(k);
                }
            }
        if (static_cast<long long>(translates_.size()) != deg_)
            throw InvalidMap("failed to enumerate inverse-branch translates");
    }

    switch (kind_) {
        case Kind::circle: cert_ = factors_[0].certificate(); break;
        case Kind::product: {
            const auto cx = factors_[0].certificate(), cy = factors_[1].certificate();
            cert_.bound = std::min(cx.bound, cy.bound);
            break;
        }
        case Kind::skew: {
            const double dd = static_cast<double>(L_(0, 0)), aa = static_cast<double>(L_(1, 1));
            double mn = std::numeric_limits<double>::infinity();
            for (int i = 0; i < kCertificateGrid; ++i) {
                Mat m(2, 2);
                m << dd, alpha_.derivative(static_cast<double>(i) / kCertificateGrid, 1), 0.0, aa;
                mn = std::min(mn, min_singular_value(m));
            }
            cert_.bound = mn - alpha_.sup_bound(2) * 0.5 / kCertificateGrid;
            break;
        }
        case Kind::linear: cert_.bound = min_singular_value(L_.cast<double>()); break;
    }
    cert_.margin = cert_.bound - 1.0;
    cert_.pass = cert_.bound > 1.0;
}

std::string ExpandingMap::kind_name() const {
    switch (kind_) {
        case Kind::circle: return "circle";
        case Kind::product: return "product";
        case Kind::skew: return "skew";
        case Kind::linear: return "linear";
    }
    return "";
}

Vec ExpandingMap::lift(const Vec& x) const {
    switch (kind_) {
        case Kind::circle: return vec1(factors_[0].lift(x[0]));
        case Kind::product: return vec2(factors_[0].lift(x[0]), factors_[1].lift(x[1]));
        case Kind::skew:
            return vec2(static_cast<double>(L_(0, 0)) * x[0] + alpha_(x[1]),
                        static_cast<double>(L_(1, 1)) * x[1]);
        case Kind::linear: return L_.cast<double>() * x;
    }
    return x;
}

Mat ExpandingMap::differential(const Vec& x) const {
    Mat m;
    switch (kind_) {
        case Kind::circle:
            m.resize(1, 1);
            m(0, 0) = factors_[0].derivative(x[0]);
            break;
        case Kind::product:
            m = Mat::Zero(2, 2);
            m(0, 0) = factors_[0].derivative(x[0]);
            m(1, 1) = factors_[1].derivative(x[1]);
            break;
        case Kind::skew:
            m.resize(2, 2);
            m << static_cast<double>(L_(0, 0)), alpha_.derivative(x[1], 1), 0.0,
                static_cast<double>(L_(1, 1));
            break;
        case Kind::linear: m = L_.cast<double>(); break;
    }
    return m;
}

double ExpandingMap::log_abs_jacobian(const Vec& x) const {
    switch (kind_) {
        case Kind::circle: return std::log(std::abs(factors_[0].derivative(x[0])));
        case Kind::product:
            return std::log(std::abs(factors_[0].derivative(x[0]))) +
                   std::log(std::abs(factors_[1].derivative(x[1])));
        case Kind::skew:
        case Kind::linear: return std::log(static_cast<double>(deg_));
    }
    return 0.0;
}

Vec ExpandingMap::inverse_lift(const Vec& x) const {
    switch (kind_) {
        case Kind::circle: return vec1(factors_[0].inverse_lift(x[0]));
        case Kind::product:
            return vec2(factors_[0].inverse_lift(x[0]), factors_[1].inverse_lift(x[1]));
        case Kind::skew: {
            const double v = x[1] / static_cast<double>(L_(1, 1));
            return vec2((x[0] - alpha_(v)) / static_cast<double>(L_(0, 0)), v);
        }
        case Kind::linear: {
            const double det = static_cast<double>(L_(0, 0) * L_(1, 1) - L_(0, 1) * L_(1, 0));
            return vec2((static_cast<double>(L_(1, 1)) * x[0] - static_cast<double>(L_(0, 1)) * x[1]) / det,
                        (-static_cast<double>(L_(1, 0)) * x[0] + static_cast<double>(L_(0, 0)) * x[1]) / det);
        }
    }
    return x;
}

std::vector<Vec> ExpandingMap::inverse_branches(const Vec& x) const {
    std::vector<Vec> out;
    out.reserve(translates_.size());
    for (const auto& k : translates_) out.push_back(wrap(inverse_lift(x + k.cast<double>())));
    return out;
}

Vec ExpandingMap::perturbation(const Vec& x) const { return lift(x) - L_.cast<double>() * x; }

double ExpandingMap::perturbation_bound() const {
    switch (kind_) {
        case Kind::circle: return factors_[0].perturbation_bound();
        case Kind::product:
            return std::max(factors_[0].perturbation_bound(), factors_[1].perturbation_bound());
        case Kind::skew: return alpha_.sup_bound(0);
        case Kind::linear: return 0.0;
    }
    return 0.0;
}

void ExpandingMap::require_expanding() const {
    if (!cert_.pass)
        throw PreconditionViolation("map fails its expansion certificate (bound " +
                                    std::to_string(cert_.bound) + ")");
}

const CircleMap& ExpandingMap::x_factor() const {
    if (factors_.empty()) throw PreconditionViolation("map has no circle factor");
    return factors_[0];
}

const CircleMap& ExpandingMap::y_factor() const {
    if (factors_.size() < 2) throw PreconditionViolation("map has no y factor");
    return factors_[1];
}

nlohmann::json ExpandingMap::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case Kind::circle: return factors_[0].to_json();
        case Kind::product:
            j["kind"] = "product";
            j["x"] = factors_[0].to_json();
            j["y"] = factors_[1].to_json();
            break;
        case Kind::skew:
            j = alpha_.to_json();
            j["kind"] = "skew";
            j["degree"] = {L_(0, 0), L_(1, 1)};
            break;
        case Kind::linear:
            j["kind"] = "linear";
            j["matrix"] = {{L_(0, 0), L_(0, 1)}, {L_(1, 0), L_(1, 1)}};
            break;
    }
    return j;
}

ExpandingMap ExpandingMap::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("map description needs 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "circle") return circle(CircleMap::from_json(j));
        if (kind == "product") {
            check_keys(j, {"kind", "x", "y"});
            return product(CircleMap::from_json(j.at("x")), CircleMap::from_json(j.at("y")));
        }
        if (kind == "skew") {
            check_keys(j, {"kind", "degree", "cos_coeffs", "sin_coeffs"});
            auto d = j.at("degree").get<std::vector<long long>>();
            if (d.size() != 2) throw ConfigError("skew degree must be [d, a]");
            return skew(d[0], d[1], TrigPoly::from_json(j));
        }
        if (kind == "linear") {
            check_keys(j, {"kind", "matrix"});
            auto m = j.at("matrix").get<std::vector<std::vector<long long>>>();
            if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
                throw ConfigError("linear matrix must be 2x2");
            IntMat L(2, 2);
            L << m[0][0], m[0][1], m[1][0], m[1][1];
            return linear(L);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed map description: ") + e.what());
    }
    throw ConfigError("unknown map kind '" + kind + "'");
}

}  // namespace rigidlab
