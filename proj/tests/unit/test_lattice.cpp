#include "rigidlab/errors.hpp"
#include "rigidlab/lattice.hpp"

#include <doctest.h>


using namespace rigidlab;

namespace {
using H = HeisenbergElement;
const mpq_class kHalf(1, 2), kQuarter(1, 4);
}  // namespace

TEST_CASE("Heisenberg arithmetic") {
    const H x{1, 0, 0}, y{0, 1, 0};
    const H u{kHalf, mpq_class(1, 3), mpq_class(-2, 5)}, v{mpq_class(3, 7), -2, kQuarter}, w{5, kHalf, 1};
    CHECK((u * v) * w == u * (v * w));
    CHECK(u * u.inverse() == H{});
    CHECK(u.inverse() * u == H{});
    CHECK(commutator(x, y) == H{0, 0, 1});
    CHECK(lcs_membership(commutator(x, y), 1));
    CHECK_FALSE(lcs_membership(x, 1));
    CHECK(lcs_membership(H{}, 2));
    CHECK_FALSE(lcs_membership(H{0, 0, 1}, 2));
}

TEST_CASE("dilation") {
    CHECK(dilation_is_lattice_endomorphism(Dilation{}));
    CHECK_FALSE(dilation_is_lattice_endomorphism(Dilation{2, 2, 2}));
    CHECK(preimage_membership(H{kHalf, kHalf, kQuarter}, 0));
    CHECK_FALSE(preimage_membership(H{kHalf, kHalf, mpq_class(1, 8)}, 0));
    CHECK(coset_group_membership(H{1, 2, kQuarter}, 1));
    CHECK_FALSE(coset_group_membership(H{kHalf, 0, 0}, 1));
}

TEST_CASE("coset commutation") {
    SUBCASE("central element") {
        const H alpha{0, 0, kQuarter}, gamma{1, 0, 0};
        const auto f = factor_lattice_left(alpha * gamma, 1);
        REQUIRE(f);
        CHECK(f->first == gamma);
        CHECK(f->second == alpha);
    }
    SUBCASE("sweeps") {
        for (int k = 0; k <= 4; ++k) {
            const auto s = verify_coset_commutation(k);
            CHECK(s.pass);
            CHECK(s.levels == std::vector<int>{0, 1, 2});
        }
    }
    SUBCASE("word length bound") { CHECK_THROWS_AS(coset_commutation_sweep(7), ConfigError); }
}

TEST_CASE("normal subgroup") {
    SUBCASE("center fixed by conjugation") {
        const H g{kHalf, kHalf, 0}, h{0, 0, kQuarter};
        const H c = g * h * g.inverse();
        CHECK(c == h);
        CHECK(coset_group_membership(c, 1));
    }
    SUBCASE("identity conjugator") {
        const auto elems = words_up_to(preimage_generators(1), 3);
        const auto s = normality_sweep({H{}}, elems, [](const H& x) { return coset_group_membership(x, 1); });
        CHECK(s.pass);
    }
    SUBCASE("sweeps") {
        for (int k = 0; k <= 4; ++k) CHECK(verify_normal_subgroup(k).pass);
    }
    SUBCASE("non-normal subgroup is caught") {
        const auto conj = words_up_to({H{0, 1, 0}}, 1);
        const auto elems = words_up_to({H{1, 0, 0}}, 1);
        const auto s = normality_sweep(conj, elems, [](const H& x) { return x.b == 0 && x.c == 0; });
        CHECK_FALSE(s.pass);
        REQUIRE(s.counterexample);
    }
}

TEST_CASE("infratorus deck group") {
    const auto T = infratorus_deck_group();
    CHECK(T[1].compose(T[2]).equal_mod_integers(T[3]));
    const auto L = linear_affine(infratorus_linear_part());
    const auto conj = L.compose(T[1]).compose(L.inverse());
    CHECK(conj.matrix == T[2].matrix);
    CHECK(conj.translation == QVector{mpq_class(3, 2), kHalf, 0});
    for (int i = 1; i <= 3; ++i) CHECK_FALSE(T[i].has_fixed_point_mod_integers());

    const auto rep = infratorus_verify();
    CHECK(rep.pass);
    CHECK(rep.closed);
    CHECK(rep.linear_part_irreducible);
    CHECK(rep.composition_table[1][2] == 3);
    CHECK(rep.composition_table[2][2] == 0);

    SUBCASE("fixed points detected") {
        // x -> -x + (1/2, 0, 0) fixes (1/4, 0, 0)
        CHECK(make_affine({{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}, {kHalf, 0, 0}).has_fixed_point_mod_integers());
        // pure translation by a non-integer vector is free
        CHECK_FALSE(make_affine({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0, kHalf, 0}).has_fixed_point_mod_integers());
        // translation along a rational line that wraps back to an integer: fixed
        CHECK(make_affine({{1, 0}, {0, 1}}, {1, 2}).has_fixed_point_mod_integers());
        // non-diagonal: swap coordinates, translate by (1/2, 1/2) -> x = (t, t + 1/2)
        CHECK(make_affine({{0, 1}, {1, 0}}, {kHalf, kHalf}).has_fixed_point_mod_integers());
        // swap with translation (1/2, 0): y + 1/2 = x, x = y mod Z, inconsistent
        CHECK_FALSE(make_affine({{0, 1}, {1, 0}}, {kHalf, 0}).has_fixed_point_mod_integers());
    }
}

TEST_CASE("Klein bottle") {
    const auto good = klein_verify(TrigPoly::sine(2, 0.01));
    CHECK(good.pass);
    CHECK(good.linear_commutes);
    CHECK(good.linear_defect == QVector{1, 0});
    CHECK(good.fixes_origin);

    const auto bad = klein_report(TrigPoly::sine(1, 0.01));
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.witness);
    CHECK(*bad.witness == 0.25);
    CHECK_THROWS_AS(klein_verify(TrigPoly::sine(1, 0.01)), VerificationFailure);
}
