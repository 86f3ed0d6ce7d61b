#include "rigidlab/errors.hpp"
#include "rigidlab/rigidity.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace rigidlab;

namespace {
constexpr double kPi = std::numbers::pi;

IntMat diag(long long a, long long b) {
    IntMat L(2, 2);
    L << a, 0, 0, b;
    return L;
}

PeriodicOrbit fixed_orbit(const Mat& D) {
    PeriodicOrbit o;
    o.period = 1;
    o.base_point = vec2(0, 0);
    o.points = {o.base_point};
    o.code = {0};
    o.orbit_differential = D;
    o.log_jacobian = std::log(std::abs(D.determinant()));
    return o;
}

Mat dmat(double a, double b) {
    Mat D(2, 2);
    D << a, 0, 0, b;
    return D;
}

// Degree-3 circle maps with g1'(0)=2, g1'(1/2)=2.5 and g2'(0)=3, g2'(1/2)=3.5.
ExpandingMap two_fixed_point_map() {
    CircleMap g1(3, TrigPoly({}, {-0.5 / (4 * kPi), -1.5 / (8 * kPi)}));
    CircleMap g2(3, TrigPoly({}, {-1.0 / (8 * kPi), 1.0 / (16 * kPi)}));
    return ExpandingMap::product(g1, g2);
}

TrigPoly random_conjugator(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // small enough that the conjugated map stays expanding
    return TrigPoly({0.015 * u(rng), 0.008 * u(rng)}, {0.015 * u(rng), 0.008 * u(rng)});
}
}  // namespace

TEST_CASE("jacobian data match") {
    const auto lin = ExpandingMap::circle(2, TrigPoly());
    const auto nonlin = ExpandingMap::circle(2, TrigPoly::sine(1, 0.1));
    SUBCASE("identity pair") {
        const auto h = conjugacy_between(nonlin, nonlin);
        const auto rep = jacobian_data_match(nonlin, nonlin, h, 6);
        CHECK(rep.verdict == Verdict::equivalent);
        CHECK(rep.max_discrepancy < 1e-12);
    }
    SUBCASE("smooth conjugate pair") {
        const auto f2 = ExpandingMap::circle(CircleMap(2, TrigPoly::sine(1, 0.05), TrigPoly::cosine(1, 0.03)));
        const auto f1 = ExpandingMap::circle(2, TrigPoly::sine(1, 0.05));
        const auto h = conjugacy_between(f1, f2);
        const auto rep = jacobian_data_match(f1, f2, h, 6);
        CHECK(rep.verdict == Verdict::equivalent);
        CHECK(rep.max_discrepancy < 1e-9);
    }
    SUBCASE("nonlinear against linear") {
        const auto h = conjugacy_between(nonlin, lin);
        const auto rep = jacobian_data_match(nonlin, lin, h, 6);
        CHECK(rep.verdict == Verdict::not_equivalent);
        CHECK(rep.first_mismatch_period == 1);
        CHECK(rep.max_discrepancy >= doctest::Approx(std::log(2 + 0.2 * kPi) - std::log(2.0)).epsilon(1e-6));
    }
}

TEST_CASE("very non-algebraic certification") {
    SUBCASE("linear map fails at (1, 2)") {
        const auto cert = very_non_algebraic_certify(ExpandingMap::linear(diag(2, 3)), 4);
        CHECK_FALSE(cert.certified);
        REQUIRE(cert.first_failure);
        CHECK(cert.first_failure->m == 1);
        CHECK(cert.first_failure->lambda == 2);
    }
    SUBCASE("two fixed points with distinct spectra") {
        const auto f = two_fixed_point_map();
        const auto orbits = orbits_up_to(f, 1);
        bool saw_a = false, saw_b = false;
        for (const auto& o : orbits) {
            const auto ev = o.orbit_differential.diagonal();
            if (std::abs(ev[0] - 2) < 1e-9 && std::abs(ev[1] - 3) < 1e-9) saw_a = true;
            if (std::abs(ev[0] - 2.5) < 1e-9 && std::abs(ev[1] - 3.5) < 1e-9) saw_b = true;
        }
        REQUIRE(saw_a);
        REQUIRE(saw_b);
        const auto cert = very_non_algebraic_certify(f, 2);
        CHECK(cert.certified);
        for (const auto& w : cert.entries) CHECK(w.period == 1);
    }
    SUBCASE("circle map certified by the fixed point") {
        NonAlgebraicOptions opt;
        opt.lambda_sets = {{2}};
        const auto cert = very_non_algebraic_certify(ExpandingMap::circle(2, TrigPoly::sine(1, 0.1)), 3, opt);
        CHECK(cert.certified);
        CHECK(cert.entries[0].period == 1);
        CHECK(cert.entries[0].point[0] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("integer eigenvalue restriction") {
        const auto sets = default_lambda_sets(diag(2, 3), true);
        CHECK(sets[0] == std::vector<long long>{2, 3});
        CHECK(sets[1] == std::vector<long long>{6});
    }
    SUBCASE("monotone in the period bound") {
        const auto f = ExpandingMap::circle(3, TrigPoly::sine(2, 0.02));
        bool before = false;
        for (int n = 1; n <= 5; ++n) {
            const auto cert = very_non_algebraic_certify(f, n);
            if (before) CHECK(cert.certified);
            before = cert.certified;
        }
        CHECK(before);
    }
}

TEST_CASE("disjoint spectrum") {
    const auto a = fixed_orbit(dmat(2, 3));
    const auto b = fixed_orbit(dmat(2.5, 3.5));
    CHECK(disjoint_spectrum_test(a, b).pass);
    CHECK_FALSE(disjoint_spectrum_test(a, a).pass);
    const auto c = disjoint_spectrum_test(a, fixed_orbit(dmat(3, 4)));
    CHECK_FALSE(c.pass);
    CHECK(c.shared_m == 1);

    SUBCASE("disjoint pair certifies every integer") {
        std::vector<std::vector<long long>> sets(2);
        for (long long v = -40; v <= 40; ++v) sets[0].push_back(v), sets[1].push_back(v);
        CHECK(very_non_algebraic_certify({a, b}, 2, sets, 1).certified);
    }
    SUBCASE("different periods") {
        PeriodicOrbit p2 = fixed_orbit(dmat(4, 9));
        p2.period = 2;
        // D f^2 at a is diag(4,9), matching p2 exactly
        CHECK_FALSE(disjoint_spectrum_test(a, p2).pass);
    }
}

TEST_CASE("critical regularity") {
    SUBCASE("linear diagonal") {
        const auto r = critical_regularity(ExpandingMap::linear(diag(2, 3)), 4, 4);
        CHECK(r.r0_minmax == doctest::Approx(std::log(3.0) / std::log(2.0)).epsilon(1e-12));
        CHECK(r.r0_periodic == doctest::Approx(std::log(3.0) / std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("circle map") {
        const auto r = critical_regularity(ExpandingMap::circle(2, TrigPoly::sine(1, 0.1)), 4, 6);
        CHECK(r.r0_minmax == doctest::Approx(1.0));
        CHECK(r.r0_periodic == doctest::Approx(1.0));
    }
    SUBCASE("product with a nonlinear factor") {
        // g' = 2 + 0.25 cos 2 pi x + 0.05 cos 4 pi x ranges over [1.8, 2.3]
        CircleMap g(2, TrigPoly({}, {0.25 / (2 * kPi), 0.05 / (4 * kPi)}));
        const auto f = ExpandingMap::product(g, CircleMap(2, TrigPoly()));
        const auto r = critical_regularity(f, 8, 10);
        const double expected = std::log(2.3) / std::log(2.0);
        CHECK(std::abs(r.r0_minmax - r.r0_periodic) < 0.05);
        CHECK(r.r0_periodic <= r.r0_minmax + 0.05);
        CHECK(r.r0_periodic == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("irreducibility") {
    SUBCASE("diagonal") {
        IntMatN L(2, 2);
        L << 2, 0, 0, 3;
        const auto r = irreducibility_test(L);
        CHECK_FALSE(r.irreducible);
        CHECK(r.char_poly == std::vector<long long>{1, -5, 6});
        REQUIRE(r.subspace.size() == 1);
        CHECK(r.subspace[0] == std::vector<long long>{1, 0});
    }
    SUBCASE("golden") {
        IntMatN L(2, 2);
        L << 2, 1, 1, 1;
        const auto r = irreducibility_test(L);
        CHECK(r.irreducible);
        CHECK(r.char_poly == std::vector<long long>{1, -3, 1});
    }
    SUBCASE("cube root of three") {
        IntMatN L(3, 3);
        L << 0, 0, 3, 1, 0, 0, 0, 1, 0;
        const auto r = irreducibility_test(L);
        CHECK(r.irreducible);
        CHECK(r.char_poly == std::vector<long long>{1, 0, 0, -3});
    }
    SUBCASE("product of quadratics in dimension four") {
        IntMatN L = IntMatN::Zero(4, 4);
        L.block(0, 0, 2, 2) << 2, 1, 1, 1;
        L.block(2, 2, 2, 2) << 0, 1, 1, 1;
        const auto r = irreducibility_test(L);
        CHECK_FALSE(r.irreducible);
        CHECK(r.factor.size() == 3);
        REQUIRE(r.subspace.size() == 2);
        // the witness must be L-invariant
        for (const auto& v : r.subspace) {
            Eigen::Matrix<long long, Eigen::Dynamic, 1> x(4);
            for (int i = 0; i < 4; ++i) x[i] = v[i];
            const auto y = (L * x).eval();
            Eigen::MatrixXd B(4, 3);
            for (int i = 0; i < 4; ++i) {
                B(i, 0) = static_cast<double>(r.subspace[0][i]);
                B(i, 1) = static_cast<double>(r.subspace[1][i]);
                B(i, 2) = static_cast<double>(y[i]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
            CHECK(lu.rank() == 2);
        }
    }
    SUBCASE("irreducible quartic") {
        IntMatN L = IntMatN::Zero(4, 4);  // companion of x^4 - 2
        L(0, 3) = 2;
        L(1, 0) = L(2, 1) = L(3, 2) = 1;
        CHECK(irreducibility_test(L).irreducible);
    }
}

TEST_CASE("maximal entropy measure against Lebesgue") {
    CHECK_FALSE(mme_not_lebesgue_test(ExpandingMap::linear(diag(2, 3)), 3).pass);
    const auto r = mme_not_lebesgue_test(ExpandingMap::circle(2, TrigPoly::sine(1, 0.1)), 4);
    CHECK(r.pass);
    CHECK(r.spread > 1e-2);
    const auto conj = ExpandingMap::circle(CircleMap(2, TrigPoly(), TrigPoly::sine(1, 0.05)));
    CHECK_FALSE(mme_not_lebesgue_test(conj, 6).pass);
}

TEST_CASE("factor data") {
    SUBCASE("product onto its vertical factor") {
        CircleMap b(2, TrigPoly::sine(1, 0.05));
        const auto f1 = ExpandingMap::product(CircleMap(3, TrigPoly::sine(1, 0.03)), b);
        const auto f2 = ExpandingMap::circle(b);
        const auto h = factor_map(f1, f2);
        const auto rep = factor_data_check(f1, f2, h, 3);
        CHECK(rep.comparison.verdict == Verdict::equivalent);
        CHECK(rep.comparison.max_discrepancy < 1e-9);
        CHECK(rep.semiconjugacy_residual < 1e-8);
    }
    SUBCASE("skew over doubling") {
        const auto f1 = ExpandingMap::skew(3, 2, TrigPoly::sine(1, 0.1));
        const auto f2 = ExpandingMap::circle(2, TrigPoly());
        const auto rep = factor_data_check(f1, f2, factor_map(f1, f2), 3);
        CHECK(rep.comparison.verdict == Verdict::equivalent);
        CHECK(rep.comparison.max_discrepancy < 1e-12);
    }
    SUBCASE("perturbed base") {
        const auto f1 = ExpandingMap::skew(3, 2, TrigPoly::sine(1, 0.1));
        const auto f2 = ExpandingMap::circle(2, TrigPoly::sine(1, 0.05));
        const auto rep = factor_data_check(f1, f2, factor_map(f1, f2), 3);
        CHECK(rep.comparison.verdict == Verdict::not_equivalent);
        CHECK(rep.comparison.first_mismatch_period <= 3);
    }
    SUBCASE("linear source rejected") {
        const auto f1 = ExpandingMap::linear(diag(3, 2));
        CHECK_THROWS_AS(factor_map(f1, ExpandingMap::circle(2, TrigPoly())), PreconditionViolation);
    }
}

TEST_CASE("rigidity verdict") {
    SUBCASE("conjugate circle maps") {
        const auto f1 = ExpandingMap::circle(2, TrigPoly::sine(1, 0.05));
        const auto f2 = ExpandingMap::circle(CircleMap(2, TrigPoly::sine(1, 0.05), TrigPoly::cosine(1, 0.03)));
        const auto v = rigidity_check(f1, f2, 5);
        CHECK(v.exit_code == 0);
        CHECK(v.non_algebraic.certified);
    }
    SUBCASE("nonlinear against linear") {
        const auto v = rigidity_check(ExpandingMap::circle(2, TrigPoly::sine(1, 0.1)),
                                      ExpandingMap::circle(2, TrigPoly()), 5);
        CHECK(v.exit_code == 2);
    }
    SUBCASE("linear map with itself is inconclusive") {
        const auto L = ExpandingMap::linear(diag(2, 3));
        const auto v = rigidity_check(L, L, 3);
        CHECK(v.exit_code == 3);
        CHECK_FALSE(v.non_algebraic.certified);
    }
}

TEST_CASE("conjugation invariance over random conjugators") {
    std::mt19937_64 rng(11);
    const TrigPoly alpha = TrigPoly::sine(1, 0.04);
    const auto f1 = ExpandingMap::circle(2, alpha);
    const auto m1 = mme_not_lebesgue_test(f1, 5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f2 = ExpandingMap::circle(CircleMap(2, alpha, random_conjugator(rng)));
        const auto h = conjugacy_between(f1, f2);
        const auto rep = jacobian_data_match(f1, f2, h, 5);
        CHECK(rep.verdict == Verdict::equivalent);
        const auto m2 = mme_not_lebesgue_test(f2, 5);
        CHECK(m2.pass == m1.pass);
        CHECK(m2.spread == doctest::Approx(m1.spread).epsilon(1e-8));
    }
}
