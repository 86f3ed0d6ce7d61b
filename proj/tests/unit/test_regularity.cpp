#include "rigidlab/conjugacy.hpp"
#include "rigidlab/errors.hpp"
#include "rigidlab/regularity.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rigidlab;

namespace {
constexpr double kPi = std::numbers::pi;
const TrigPoly kSine = TrigPoly::sine(1, 1.0);
}  // namespace

TEST_CASE("dll series") {
    SUBCASE("zero input") {
        const auto b = dll_beta(TrigPoly(), 3, 2, kTailTol, 1024);
        CHECK(b.sup_norm() == 0.0);
    }
    SUBCASE("vanishes at the origin") {
        const auto b = dll_beta(kSine, 3, 2, kTailTol, 1024);
        CHECK(b.value(0) == 0.0);
    }
    SUBCASE("functional equation") {
        for (auto [d, a] : {std::pair{3LL, 2LL}, {5LL, 2LL}, {5LL, 3LL}, {4LL, 2LL}}) {
            const auto b = dll_beta(kSine, d, a);
            CHECK(dll_functional_residual(b, kSine, d, a) < kTailTol);
        }
    }
    SUBCASE("direct summation at a node") {
        const auto b = dll_beta(kSine, 3, 2, kTailTol, 1024);
        const double y = 37.0 / 1024.0;
        double direct = 0.0;
        for (int i = 0; i < 60; ++i) direct += std::sin(2 * kPi * std::fmod(std::ldexp(y, i), 1.0)) / std::pow(3.0, i + 1);
        CHECK(b.value(37) == doctest::Approx(direct).epsilon(1e-12));
    }
    SUBCASE("divergent derivative rejected") {
        CHECK_THROWS_AS(dll_beta_derivative(kSine, 2, 2), PreconditionViolation);
    }
}

TEST_CASE("linearization shear equals the dll series") {
    const TrigPoly alpha = TrigPoly::sine(1, 0.1);
    const auto f = ExpandingMap::skew(3, 2, alpha);
    const auto h = linearize(f);
    const auto b = dll_beta(alpha, 3, 2, kTailTol, 1024);
    double worst = 0.0;
    for (int j = 0; j < 1024; j += 7) {
        const Vec p = vec2(0.3, j / 1024.0);
        const Vec q = h.lift(p);
        worst = std::max(worst, std::abs(q[0] - p[0] - b.value(j)));
        CHECK(q[1] == doctest::Approx(p[1]));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("Holder exponent estimator") {
    SUBCASE("smooth data saturates") {
        const auto g = GridFunction::sample(1, 1 << 14, [](const Vec& x) { return std::sin(2 * kPi * x[0]); });
        const auto e = holder_exponent(g);
        CHECK(e.integer_part == 3);
        CHECK(e.saturated);
    }
    SUBCASE("lacunary series with exponent one half") {
        const auto g = GridFunction::sample(1, 1 << 16, [](const Vec& x) {
            double s = 0.0;
            for (int k = 0; k < 40; ++k) s += std::pow(2.0, -0.5 * k) * std::cos(2 * kPi * std::fmod(std::ldexp(x[0], k), 1.0));
            return s;
        });
        const auto e = holder_exponent(g);
        CHECK(e.integer_part == 0);
        CHECK(e.exponent == doctest::Approx(0.5).epsilon(0.1));
        CHECK(std::abs(e.exponent - 0.5) < 0.05);
    }
    SUBCASE("regularity equals log d / log a") {
        for (auto [d, a] : {std::pair{3LL, 2LL}, {5LL, 2LL}, {5LL, 3LL}}) {
            const double r0 = std::log(static_cast<double>(d)) / std::log(static_cast<double>(a));
            const auto e = holder_exponent(dll_beta(kSine, d, a));
            CAPTURE(d);
            CAPTURE(a);
            CHECK(e.integer_part == static_cast<int>(std::floor(r0)));
            CHECK(std::abs(e.integer_part + e.exponent - r0) < 0.05);
        }
    }
    SUBCASE("log correction for integer ratio") {
        const auto dbeta = dll_beta_derivative(kSine, 4, 2);
        std::vector<ScaleRow> rows;
        const auto& v = dbeta.values();
        const int N = dbeta.resolution();
        for (int s = 6; s <= 14; ++s) {
            const int step = N >> s;
            double sup = 0.0;
            for (int x = 0; x < N; ++x) sup = std::max(sup, std::abs(v[(x + step) % N] - v[x]));
            rows.push_back({static_cast<double>(step) / N, sup});
        }
        CHECK(fit_power(rows, true).rss < fit_power(rows, false).rss);
        const auto e = holder_exponent(dll_beta(kSine, 4, 2));
        CHECK(e.integer_part == 1);
        CHECK(e.log_model_preferred);
    }
    SUBCASE("insufficient resolution") {
        CHECK_THROWS_AS(holder_exponent(GridFunction::constant(1, 1024, 0.0)), InsufficientResolution);
    }
}

TEST_CASE("dll case table") {
    auto c = classify_dll_case(0.5, 3, 2);
    CHECK(c.dll_case == DllCase::I);
    CHECK(c.prediction == "C^{0.5}");

    c = classify_dll_case(std::numeric_limits<double>::infinity(), 4, 2);
    CHECK(c.dll_case == DllCase::III);
    CHECK(c.prediction == "C^{1+x|log x|}");

    c = classify_dll_case(std::log(3.0) / std::log(2.0), 3, 2);
    CHECK(c.dll_case == DllCase::IV);
    CHECK(c.prediction == "C^{1+x^{0.585}|log x|}");

    c = classify_dll_case(5.0, 3, 2);
    CHECK(c.dll_case == DllCase::II);
    CHECK(c.prediction == "C^{1.585}");

    c = classify_dll_case(5.0, 8, 2);
    CHECK(c.r0_integer);
    CHECK(c.prediction == "C^{2+x|log x|}");
}
