#include "rigidlab/errors.hpp"
#include "rigidlab/periodic.hpp"
#include "rigidlab/potential.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rigidlab;

namespace {
constexpr double kPi = std::numbers::pi;

IntMat mat(long long a, long long b, long long c, long long d) {
    IntMat L(2, 2);
    L << a, b, c, d;
    return L;
}

long long det_power_minus_identity(const IntMat& L, int n) {
    IntMat P = IntMat::Identity(2, 2);
    for (int i = 0; i < n; ++i) P = P * L;
    P -= IntMat::Identity(2, 2);
    return std::llabs(P(0, 0) * P(1, 1) - P(0, 1) * P(1, 0));
}
}  // namespace

TEST_CASE("doubling map period two") {
    const auto f = ExpandingMap::circle(2, TrigPoly());
    const auto orbits = fixed_points_of_iterate(f, 2);
    REQUIRE(orbits.size() == 2);
    CHECK(orbits[0].period == 1);
    CHECK(orbits[0].base_point[0] == 0.0);
    CHECK(orbits[1].period == 2);
    CHECK(std::abs(orbits[1].points[0][0] - 1.0 / 3) < 1e-15);
    CHECK(std::abs(orbits[1].points[1][0] - 2.0 / 3) < 1e-15);
    CHECK(orbits[1].code_string() == "0.1");
}

TEST_CASE("tripling map fixed points") {
    const auto orbits = fixed_points_of_iterate(ExpandingMap::circle(3, TrigPoly()), 1);
    REQUIRE(orbits.size() == 2);
    CHECK(orbits[0].base_point[0] == 0.0);
    CHECK(std::abs(orbits[1].base_point[0] - 0.5) < 1e-15);
}

TEST_CASE("nonlinear period three residuals") {
    const auto f = ExpandingMap::circle(2, TrigPoly::sine(1, 0.1));
    const auto orbits = fixed_points_of_iterate(f, 3);
    CHECK(fixed_point_count(orbits) == 7);
    for (const auto& o : orbits)
        for (const auto& p : o.points) {
            Vec y = p;
            for (int k = 0; k < 3; ++k) y = f.evaluate(y);
            CHECK(torus_distance(y, p) < 1e-10);
        }
}

TEST_CASE("orbit invariants") {
    std::vector<ExpandingMap> maps = {
        ExpandingMap::circle(2, TrigPoly({0.05}, {0.1})),
        ExpandingMap::circle(-3, TrigPoly({}, {0.1})),
        ExpandingMap::skew(3, 2, TrigPoly::sine(1, 0.3)),
        ExpandingMap::product(CircleMap(2, TrigPoly({}, {0.1})), CircleMap(2, TrigPoly({0.05}, {}))),
    };
    for (const auto& f : maps) {
        for (int n = 1; n <= 4; ++n) {
            const auto orbits = fixed_points_of_iterate(f, n);
            // Fix(f^n) has |det(L^n - I)| points
            long long expect = f.dim() == 1
                                   ? std::llabs(static_cast<long long>(std::llround(std::pow(f.linear_part()(0, 0), n))) - 1)
                                   : det_power_minus_identity(f.linear_part(), n);
            CHECK(fixed_point_count(orbits) == expect);
            for (const auto& o : orbits) {
                CHECK(n % o.period == 0);
                for (int k = 0; k < o.period; ++k)
                    CHECK(torus_distance(f.evaluate(o.points[k]), o.points[(k + 1) % o.period]) < 1e-10);
                double lj = 0.0;
                for (const auto& p : o.points) lj += std::log(std::abs(f.differential(p).determinant()));
                CHECK(std::abs(lj - o.log_jacobian) < 1e-10);
                CHECK(std::abs(birkhoff_sum(o, log_jacobian_field(f)) - o.log_jacobian) < 1e-10);
                for (const auto& e : eigenvalues(o.orbit_differential)) CHECK(std::abs(e) > 1.0);
            }
        }
    }
}

TEST_CASE("linear model matches the lattice formula") {
    const auto f = ExpandingMap::circle(2, TrigPoly());
    const int n = 6;
    const auto orbits = fixed_points_of_iterate(f, n);
    const long long m = (1LL << n) - 1;
    long long total = 0;
    for (const auto& o : orbits)
        for (const auto& p : o.points) {
            const double k = std::round(p[0] * m);
            CHECK(std::abs(p[0] - k / m) < 1e-12);
            ++total;
        }
    CHECK(total == m);
}

TEST_CASE("linear torus orbit counts") {
    const auto L = mat(2, 1, 1, 3);
    const auto f = ExpandingMap::linear(L);
    for (int n = 1; n <= 4; ++n) CHECK(fixed_point_count(fixed_points_of_iterate(f, n)) == det_power_minus_identity(L, n));
}

TEST_CASE("birkhoff sums") {
    const auto f = ExpandingMap::circle(2, TrigPoly());
    const auto orbits = fixed_points_of_iterate(f, 2);
    const auto phi = trig_field(TrigPoly::cosine(1));
    CHECK(birkhoff_sum(orbits[0], phi) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(birkhoff_sum(orbits[1], phi) == doctest::Approx(std::cos(2 * kPi / 3) + std::cos(4 * kPi / 3)).epsilon(1e-14));
    CHECK(birkhoff_sum(orbits[1], [](const Vec&) { return 0.0; }) == 0.0);
}

TEST_CASE("lyapunov exponents") {
    const auto lin = ExpandingMap::linear(mat(2, 0, 0, 3));
    auto ex = lyapunov_exponents(fixed_points_of_iterate(lin, 1)[0]);
    REQUIRE(ex.size() == 2);
    CHECK(ex[0] == doctest::Approx(std::log(2.0)));
    CHECK(ex[1] == doctest::Approx(std::log(3.0)));
    const auto f = ExpandingMap::circle(2, TrigPoly::sine(1, 0.1));
    CHECK(lyapunov_exponents(fixed_points_of_iterate(f, 1)[0])[0] == doctest::Approx(std::log(2 + 0.2 * kPi)));
    const auto dbl = ExpandingMap::circle(2, TrigPoly());
    auto o2 = fixed_points_of_iterate(dbl, 2)[1];
    CHECK(lyapunov_exponents(o2)[0] == doctest::Approx(std::log(2.0)));
}

TEST_CASE("enumeration cap") {
    const auto f = ExpandingMap::circle(2, TrigPoly());
    CHECK_THROWS_AS(fixed_points_of_iterate(f, 19), EnumerationCapExceeded);
    CHECK_NOTHROW(fixed_points_of_iterate(f, 5, 32));
    CHECK_THROWS_AS(fixed_points_of_iterate(f, 6, 32), EnumerationCapExceeded);
}

TEST_CASE("orbit CSV export") {
    const auto csv = orbits_to_csv(fixed_points_of_iterate(ExpandingMap::circle(2, TrigPoly()), 2));
    CHECK(csv.rfind("period,code,points,log_jacobian,exponents\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
