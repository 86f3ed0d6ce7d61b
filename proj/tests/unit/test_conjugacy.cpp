#include "rigidlab/conjugacy.hpp"
#include "rigidlab/errors.hpp"
#include "rigidlab/potential.hpp"
#include "rigidlab/transfer.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rigidlab;

namespace {
constexpr double kPi = std::numbers::pi;

/// g(x) = 2x - (0.5 / 2 pi) sin 2 pi x, so g'(0) = 1.5.
CircleMap slow_fixed_point_map() { return CircleMap(2, TrigPoly::sine(1, -0.5 / (2 * kPi))); }

IntMat diag(long long a, long long b) {
    IntMat L(2, 2);
    L << a, 0, 0, b;
    return L;
}
}  // namespace

TEST_CASE("linear maps linearize to the identity") {
    const auto f = ExpandingMap::circle(2, TrigPoly());
    const auto h = linearize(f);
    CHECK(h.n_terms() == 0);
    CHECK(h.residual() == 0.0);
    CHECK(h(vec1(0.37))[0] == 0.37);
    const auto k = delinearize(ExpandingMap::linear(diag(2, 3)));
    CHECK(torus_distance(k(vec2(0.1, 0.7)), vec2(0.1, 0.7)) == 0.0);
}

TEST_CASE("linearization of a nonlinear circle map") {
    const auto f = ExpandingMap::circle(2, TrigPoly::sine(1, 0.1));
    const auto h = linearize(f);
    CHECK(h.lift(vec1(0.0))[0] == 0.0);
    CHECK(h.residual() < 1e-10);
    CHECK(h.n_terms() <= 40);
    // lift is a degree-one homeomorphism
    for (int i = 0; i < 50; ++i) {
        const double x = i / 50.0 + 0.0031;
        for (int v : {-2, 1, 3}) CHECK(std::abs(h.lift(vec1(x + v))[0] - h.lift(vec1(x))[0] - v) < 1e-10);
    }
    CHECK(lift_is_increasing(h, 4096));
}

TEST_CASE("delinearization inverts the linearization") {
    const auto f = ExpandingMap::circle(2, TrigPoly::sine(1, 0.1));
    const auto h = linearize(f);
    const auto k = delinearize(f);
    CHECK(k.residual() < kConjTol);
    CHECK(composition_residual(k, h, 1024) < 1e-8);
    CHECK(lift_is_increasing(k, 4096));
}

TEST_CASE("conjugacy between maps with the same linear part") {
    const auto f = ExpandingMap::circle(2, TrigPoly({0.03}, {0.1}));
    const auto same = conjugacy_between(f, f);
    double err = 0.0;
    for (int i = 0; i < 1024; ++i) err = std::max(err, torus_distance(same(vec1(i / 1024.0)), vec1(i / 1024.0)));
    CHECK(err < 1e-8);
    const auto lin = ExpandingMap::circle(2, TrigPoly());
    const auto h = conjugacy_between(f, lin);
    const auto h1 = linearize(f);
    for (int i = 0; i < 64; ++i) CHECK(h(vec1(i / 64.0))[0] == h1(vec1(i / 64.0))[0]);
    CHECK_THROWS_AS(conjugacy_between(f, ExpandingMap::circle(3, TrigPoly())), LinearPartMismatch);
    const auto g = ExpandingMap::circle(2, TrigPoly({-0.02}, {0.05, 0.02}));
    const auto hg = conjugacy_between(f, g);
    CHECK(hg.residual() < 10 * kConjTol);
    CHECK(lift_is_increasing(hg, 4096));
}

TEST_CASE("product example keeps the vertical coordinate") {
    const auto f1 = ExpandingMap::product(slow_fixed_point_map(), CircleMap(2, TrigPoly()));
    const auto f2 = ExpandingMap::linear(diag(2, 2));
    const auto h = conjugacy_between(f1, f2);
    CHECK(h.residual() < 1e-7);
    for (int i = 0; i < 40; ++i) {
        const Vec x = vec2(std::fmod(0.37 * i, 1.0), std::fmod(0.61 * i + 0.05, 1.0));
        CHECK(std::abs(h(x)[1] - x[1]) < 1e-9);
    }
}

TEST_CASE("conjugacy of a smooth-conjugate pair is the conjugator") {
    const TrigPoly alpha({0.02}, {0.08});
    const TrigPoly s({}, {0.04, 0.01});
    const auto f1 = ExpandingMap::circle(2, alpha);
    const auto f2 = ExpandingMap::circle(CircleMap(2, alpha, s));
    const auto h = conjugacy_between(f1, f2);
    CHECK(h.residual() < 1e-7);
    for (int i = 0; i < 100; ++i) {
        const double x = i / 100.0;
        CHECK(torus_distance(h(vec1(x)), vec1(x + s(x))) < 1e-8);
    }
}

TEST_CASE("local exponent at a slow fixed point") {
    const double theta = local_scaling_exponent(slow_fixed_point_map());
    CHECK(std::abs(theta - std::log(2.0) / std::log(1.5)) < 0.05);
}

TEST_CASE("fiber estimate") {
    SUBCASE("vertical gradients give a horizontal kernel") {
        const auto f1 = ExpandingMap::product(slow_fixed_point_map(), CircleMap(2, TrigPoly()));
        std::vector<GridFunction> pots;
        for (const auto& p : {TrigPoly::cosine(1), TrigPoly::sine(1)})
            pots.push_back(normalize_potential(f1, GridFunction::sample(2, 64, trig_field(p, 1))).phi_hat);
        const auto r = fiber_direction_estimate(pots, 2, 64);
        CHECK(r.min_dimension == 1);
        CHECK(r.fraction_spanned_by(vec2(1.0, 0.0)) >= 0.99);
    }
    SUBCASE("independent gradients give a trivial kernel") {
        const auto L = ExpandingMap::linear(diag(2, 2));
        std::vector<GridFunction> pots;
        pots.push_back(normalize_potential(L, GridFunction::sample(2, 64, trig_field(TrigPoly::cosine(1), 0))).phi_hat);
        pots.push_back(normalize_potential(L, GridFunction::sample(2, 64, trig_field(TrigPoly::cosine(1), 1))).phi_hat);
        CHECK(fiber_direction_estimate(pots, 2, 64).min_dimension == 0);
    }
    SUBCASE("empty family") {
        const auto r = fiber_direction_estimate({}, 2, 32);
        CHECK(r.min_dimension == 2);
        CHECK(r.empty_family);
    }
}
