#include "rigidlab/errors.hpp"
#include "rigidlab/potential.hpp"
#include "rigidlab/transfer.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rigidlab;

namespace {
constexpr double kPi = std::numbers::pi;

GridFunction sampled(const ExpandingMap& f, const ScalarField& phi, int n) {
    return GridFunction::sample(f.dim(), n, phi);
}
}  // namespace

TEST_CASE("grid interpolation") {
    const auto g = GridFunction::sample(1, 64, [](const Vec& x) { return std::sin(2 * kPi * x[0]); });
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g(g.node(i)) == g.value(i));
    double err = 0.0, derr = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = (i + 0.5) / 1000.0;
        err = std::max(err, std::abs(g(vec1(x)) - std::sin(2 * kPi * x)));
        derr = std::max(derr, std::abs(g.gradient(vec1(x))[0] - 2 * kPi * std::cos(2 * kPi * x)));
    }
    CHECK(err < 1e-6);
    CHECK(derr < 1e-3);
    const auto h = GridFunction::sample(2, 32, [](const Vec& x) { return std::cos(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]); });
    for (std::size_t i = 0; i < h.size(); i += 7) CHECK(h(h.node(i)) == h.value(i));
    CHECK(std::abs(h(vec2(0.13, 0.71)) - std::cos(2 * kPi * 0.13) * std::sin(2 * kPi * 0.71)) < 1e-4);
    CHECK_THROWS_AS(GridFunction::constant(1, 8, 0.0), PreconditionViolation);
    CHECK_THROWS_AS(GridFunction::constant(1, 48, 0.0), PreconditionViolation);
}

TEST_CASE("transfer operator on the doubling map") {
    const auto f = ExpandingMap::circle(2, TrigPoly());
    const int n = 128;
    const auto zero = GridFunction::constant(1, n, 0.0);
    const auto one = GridFunction::constant(1, n, 1.0);
    auto l1 = apply_transfer(f, zero, one);
    for (double v : l1.values()) CHECK(v == doctest::Approx(2.0).epsilon(1e-15));
    const auto f3 = ExpandingMap::circle(3, TrigPoly());
    auto lg = apply_transfer(f3, GridFunction::constant(1, n, -std::log(3.0)), one);
    for (double v : lg.values()) CHECK(std::abs(v - 1.0) < 1e-14);
    const auto cosv = GridFunction::sample(1, 1024, [](const Vec& x) { return std::cos(2 * kPi * x[0]); });
    auto lc = apply_transfer(f, GridFunction::constant(1, 1024, 0.0), cosv);
    CHECK(lc.sup_norm() < 1e-10);
}

TEST_CASE("leading eigendata of linear maps") {
    for (long long d : {2LL, 3LL}) {
        const auto f = ExpandingMap::circle(d, TrigPoly());
        auto e = leading_eigendata(f, GridFunction::constant(1, 256, 0.0));
        CHECK(std::abs(e.c - std::log(static_cast<double>(d))) < 1e-12);
        CHECK(e.u.sup_norm() < 1e-12);
        auto e2 = leading_eigendata(f, GridFunction::constant(1, 256, 0.7));
        CHECK(std::abs(e2.c - std::log(static_cast<double>(d)) - 0.7) < 1e-12);
    }
}

TEST_CASE("geometric potential has zero pressure") {
    const auto f = ExpandingMap::circle(2, TrigPoly::sine(1, 0.1));
    auto e = leading_eigendata(f, sampled(f, geometric_potential(f), 1024));
    CHECK(std::abs(e.c) < 1e-8);
    CHECK(e.residual < kEigTol);
    // e^u is the invariant density: the transfer operator fixes it
    std::vector<double> dens(e.u.size());
    for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = std::exp(e.u.value(i));
    const GridFunction rho(1, 1024, dens);
    auto lrho = apply_transfer(f, sampled(f, geometric_potential(f), 1024), rho);
    for (std::size_t i = 0; i < dens.size(); ++i) CHECK(std::abs(lrho.value(i) - dens[i]) < 1e-8);
    const double p = pressure_via_periodic_orbits(f, geometric_potential(f), 12);
    CHECK(std::abs(p - e.c) < 0.01);
}

TEST_CASE("normalized potentials") {
    const auto f = ExpandingMap::circle(3, TrigPoly());
    auto np = normalize_potential(f, GridFunction::constant(1, 128, 0.0));
    for (double v : np.phi_hat.values()) CHECK(std::abs(v + std::log(3.0)) < 1e-12);
    const auto f2 = ExpandingMap::circle(2, TrigPoly());
    auto np2 = normalize_potential(f2, sampled(f2, geometric_potential(f2), 128));
    for (double v : np2.phi_hat.values()) CHECK(std::abs(v + std::log(2.0)) < 1e-12);
    const auto g = ExpandingMap::circle(2, TrigPoly::sine(1, 0.1));
    const auto phi = sampled(g, geometric_potential(g), 1024);
    auto np3 = normalize_potential(g, phi);
    CHECK(np3.normalization_residual < 1e-8);
    double spread = 0.0;
    for (double v : np3.phi_hat.values()) spread = std::max(spread, std::abs(v - np3.phi_hat.value(0)));
    CHECK(spread > 1e-3);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const Vec x = phi.node(i);
        const double expect = phi.value(i) - np3.c + np3.u.value(i) - np3.u(g.evaluate(x));
        CHECK(std::abs(np3.phi_hat.value(i) - expect) < 1e-12);
    }
}

TEST_CASE("eigenfunction does not depend on the starting function") {
    const auto f = ExpandingMap::circle(2, TrigPoly({0.05}, {0.1}));
    const auto phi = sampled(f, trig_field(TrigPoly({0.3}, {0.2})), 512);
    auto a = leading_eigendata(f, phi);
    EigenOptions opt;
    opt.initial_u = GridFunction::sample(1, 512, [](const Vec& x) { return 0.5 * std::sin(2 * kPi * x[0]) + 0.2; });
    auto b = leading_eigendata(f, phi, opt);
    double d = 0.0;
    for (std::size_t i = 0; i < a.u.size(); ++i) d = std::max(d, std::abs(a.u.value(i) - b.u.value(i)));
    CHECK(d < 10 * kEigTol);
    CHECK(std::abs(a.c - b.c) < 10 * kEigTol);
}

TEST_CASE("resolution refinement changes c only slightly") {
    const auto f = ExpandingMap::circle(2, TrigPoly({0.05}, {0.1}));
    const auto phi = trig_field(TrigPoly({0.3}, {0.2}));
    auto a = leading_eigendata(f, sampled(f, phi, 1024));
    auto b = leading_eigendata(f, sampled(f, phi, 2048));
    CHECK(std::abs(a.c - b.c) < 10 * kEigTol);
}

TEST_CASE("pressure from periodic orbits") {
    const auto f = ExpandingMap::circle(2, TrigPoly());
    CHECK(pressure_via_periodic_orbits(f, [](const Vec&) { return 0.0; }, 10) ==
          doctest::Approx(std::log(1023.0) / 10).epsilon(1e-13));
    CHECK(pressure_via_periodic_orbits(f, [](const Vec&) { return -std::log(2.0); }, 10) ==
          doctest::Approx(std::log(1023.0 / 1024.0) / 10).epsilon(1e-10));
}

TEST_CASE("product maps factor the eigenproblem") {
    const CircleMap gx(2, TrigPoly({}, {0.08}));
    const CircleMap gy(2, TrigPoly({0.05}, {0.1}));
    const auto f = ExpandingMap::product(gx, gy);
    const auto phi_y = TrigPoly({0.3}, {0.1});
    auto e2 = leading_eigendata(f, GridFunction::sample(2, 64, trig_field(phi_y, 1)));
    auto e1 = leading_eigendata(ExpandingMap::circle(gy), GridFunction::sample(1, 64, trig_field(phi_y, 0)));
    CHECK(std::abs(e2.c - std::log(2.0) - e1.c) < 1e-9);
    double xvar = 0.0;
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i) xvar = std::max(xvar, std::abs(e2.u.value(i + 64 * j) - e2.u.value(64 * j)));
    CHECK(xvar < 10 * kEigTol);
}
