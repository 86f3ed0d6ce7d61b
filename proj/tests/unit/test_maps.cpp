#include "rigidlab/errors.hpp"
#include "rigidlab/maps.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rigidlab;

namespace {
constexpr double kPi = std::numbers::pi;

ExpandingMap sine_circle(double amp) { return ExpandingMap::circle(2, TrigPoly::sine(1, amp)); }

IntMat diag(long long a, long long b) {
    IntMat L(2, 2);
    L << a, 0, 0, b;
    return L;
}

/// Bisection on the monotone lift over one branch interval.
double bisect_preimage(const ExpandingMap& f, double target, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f.lift(vec1(mid))[0] < target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("evaluate reduces to the unit cube") {
    CHECK(ExpandingMap::circle(2, TrigPoly()).evaluate(vec1(0.3))[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(sine_circle(0.1).evaluate(vec1(0.0))[0] == 0.0);
    const auto skew = ExpandingMap::skew(3, 2, TrigPoly::sine(1));
    const Vec y = skew.evaluate(vec2(0.0, 0.25));
    CHECK(torus_distance(y, vec2(0.0, 0.5)) < 1e-15);
    const auto f = sine_circle(0.1);
    for (int i = 0; i < 100; ++i) {
        double v = f.evaluate(vec1(i / 100.0 + 0.003))[0];
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("differential matches closed forms") {
    const auto lin = ExpandingMap::linear(diag(2, 3));
    Mat d = lin.differential(vec2(0.4, 0.7));
    CHECK(d(0, 0) == 2.0);
    CHECK(d(1, 1) == 3.0);
    CHECK(d(0, 1) == 0.0);
    CHECK(d(1, 0) == 0.0);
    CHECK(sine_circle(0.1).differential(vec1(0.0))(0, 0) == doctest::Approx(2.0 + 0.2 * kPi).epsilon(1e-14));
    Mat s = ExpandingMap::skew(3, 2, TrigPoly::sine(1)).differential(vec2(0.1, 0.0));
    CHECK(s(0, 0) == 3.0);
    CHECK(s(0, 1) == doctest::Approx(2 * kPi).epsilon(1e-14));
    CHECK(s(1, 0) == 0.0);
    CHECK(s(1, 1) == 2.0);
}

TEST_CASE("differential agrees with centered differences") {
    std::vector<ExpandingMap> maps = {
        sine_circle(0.1),
        ExpandingMap::circle(CircleMap(3, TrigPoly({0.05, 0.02}, {0.1}), TrigPoly({}, {0.03, 0.01}))),
        ExpandingMap::skew(3, 2, TrigPoly({0.3}, {1.0})),
        ExpandingMap::product(CircleMap(2, TrigPoly({0.05}, {0.1})), CircleMap(3, TrigPoly({}, {0.1, 0.02}))),
    };
    const double h = 1e-5;
    for (const auto& f : maps) {
        for (int i = 0; i < 37; ++i) {
            Vec x = Vec::Constant(f.dim(), 0.0);
            x[0] = (i + 0.37) / 37.0;
            if (f.dim() == 2) x[1] = std::fmod(0.61 * i + 0.11, 1.0);
            Mat d = f.differential(x);
            for (int c = 0; c < f.dim(); ++c) {
                Vec e = Vec::Zero(f.dim());
                e[c] = h;
                Vec fd = (f.lift(x + e) - f.lift(x - e)) / (2 * h);
                for (int r = 0; r < f.dim(); ++r)
                    CHECK(std::abs(fd[r] - d(r, c)) < 1e-6 * std::max(1.0, std::abs(d(r, c))));
            }
        }
    }
}

TEST_CASE("inverse branches of the doubling map") {
    const auto f = ExpandingMap::circle(2, TrigPoly());
    auto b0 = f.inverse_branches(vec1(0.0));
    REQUIRE(b0.size() == 2);
    CHECK(b0[0][0] == 0.0);
    CHECK(b0[1][0] == 0.5);
    auto b1 = f.inverse_branches(vec1(0.5));
    CHECK(b1[0][0] == 0.25);
    CHECK(b1[1][0] == 0.75);
}

TEST_CASE("inverse branches agree with a bisection oracle") {
    const auto f = sine_circle(0.1);
    auto ys = f.inverse_branches(vec1(0.0));
    REQUIRE(ys.size() == 2);
    for (int k = 0; k < 2; ++k) {
        // lift maps [k/2 - 0.1, (k+1)/2 + 0.1] over the target k
        const double oracle = bisect_preimage(f, static_cast<double>(k), k / 2.0 - 0.1, k / 2.0 + 0.1);
        CHECK(torus_distance(ys[k], vec1(oracle)) < 1e-12);
        CHECK(torus_distance(f.evaluate(ys[k]), vec1(0.0)) < 1e-12);
    }
}

TEST_CASE("inverse branches are right inverses on a 256 grid") {
    std::vector<ExpandingMap> maps = {
        sine_circle(0.1),
        ExpandingMap::circle(CircleMap(-3, TrigPoly({0.05}, {0.1, 0.03}))),
        ExpandingMap::circle(CircleMap(2, TrigPoly({}, {0.1}), TrigPoly({0.02}, {0.05}))),
        ExpandingMap::skew(3, 2, TrigPoly::sine(1)),
        ExpandingMap::linear([] { IntMat L(2, 2); L << 2, 1, 1, 3; return L; }()),
        ExpandingMap::product(CircleMap(2, TrigPoly({}, {0.1})), CircleMap(3, TrigPoly({0.05}, {}))),
    };
    for (const auto& f : maps) {
        CHECK(static_cast<long long>(f.branch_translates().size()) == f.degree());
        for (int i = 0; i < 256; ++i) {
            Vec x = Vec::Constant(f.dim(), i / 256.0);
            if (f.dim() == 2) x[1] = std::fmod(i * 0.3819660112501051, 1.0);
            auto ys = f.inverse_branches(x);
            CHECK(static_cast<long long>(ys.size()) == f.degree());
            for (const auto& y : ys) CHECK(torus_distance(f.evaluate(y), x) < 1e-10);
            for (std::size_t a = 0; a < ys.size(); ++a)
                for (std::size_t b = a + 1; b < ys.size(); ++b) CHECK(torus_distance(ys[a], ys[b]) > 1e-6);
        }
    }
}

TEST_CASE("expansion certificate") {
    const auto bad = sine_circle(0.3).expansion_certificate();
    CHECK_FALSE(bad.pass);
    CHECK(bad.bound == doctest::Approx(2 - 0.6 * kPi).epsilon(1e-3));
    const auto good = sine_circle(0.1).expansion_certificate();
    CHECK(good.pass);
    CHECK(good.bound <= 2 - 0.2 * kPi);
    CHECK(good.margin == doctest::Approx(1 - 0.2 * kPi).epsilon(1e-3));
    const auto lin = ExpandingMap::linear(diag(2, 3)).expansion_certificate();
    CHECK(lin.pass);
    CHECK(lin.margin == doctest::Approx(1.0));
}

TEST_CASE("degenerate maps are rejected") {
    CHECK_THROWS_AS(ExpandingMap::circle(1, TrigPoly()), InvalidMap);
    CHECK_THROWS_AS(ExpandingMap::linear(diag(1, 1)), InvalidMap);
    CHECK_THROWS_AS(ExpandingMap::skew(3, 1, TrigPoly()), InvalidMap);
}

TEST_CASE("map JSON round trip") {
    std::vector<ExpandingMap> maps = {
        sine_circle(0.1),
        ExpandingMap::circle(CircleMap(2, TrigPoly({}, {0.1}), TrigPoly({0.02}, {0.05}))),
        ExpandingMap::skew(3, 2, TrigPoly::sine(1)),
        ExpandingMap::linear(diag(2, 3)),
        ExpandingMap::product(CircleMap(2, TrigPoly({}, {0.1})), CircleMap(3, TrigPoly({0.05}, {}))),
    };
    for (const auto& f : maps) {
        const auto g = ExpandingMap::from_json(f.to_json());
        CHECK(g.to_json() == f.to_json());
        Vec x = Vec::Constant(f.dim(), 0.123);
        CHECK((g.lift(x) - f.lift(x)).norm() == 0.0);
    }
    CHECK_THROWS_AS(ExpandingMap::from_json({{"kind", "circle"}, {"degree", 2}, {"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(ExpandingMap::from_json({{"kind", "sphere"}}), ConfigError);
}
