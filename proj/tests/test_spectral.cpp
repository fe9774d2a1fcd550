#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <climits>

#include "qrg/errors.hpp"
#include "qrg/rng.hpp"
#include "qrg/spectral.hpp"

using namespace qrg;

namespace {

std::vector<int> degrees_of(const char* spec, std::uint64_t seed = 42) {
    return irrep_degrees(build_group(spec), seed).degrees;
}

} // namespace

TEST_CASE("degree oracle reproduces known multisets") {
    CHECK(degrees_of("cyclic(6)") == std::vector<int>{1, 1, 1, 1, 1, 1});
    CHECK(degrees_of("symmetric(3)") == std::vector<int>{1, 1, 2});
    CHECK(degrees_of("symmetric(4)") == std::vector<int>{1, 1, 2, 3, 3});
    CHECK(degrees_of("dihedral(4)") == std::vector<int>{1, 1, 1, 1, 2});
    CHECK(degrees_of("dihedral(5)") == std::vector<int>{1, 1, 2, 2});
    CHECK(degrees_of("alternating(4)") == std::vector<int>{1, 1, 1, 3});
    CHECK(degrees_of("alternating(5)") == std::vector<int>{1, 3, 3, 4, 5});
    CHECK(degrees_of("sl2(3)") == std::vector<int>{1, 1, 1, 2, 2, 2, 3});
    CHECK(degrees_of("psl2(7)") == std::vector<int>{1, 3, 3, 6, 7, 8});
    CHECK(degrees_of("product(cyclic(2),symmetric(3))") ==
          std::vector<int>{1, 1, 1, 1, 2, 2});
}

TEST_CASE("degree oracle structural invariants and seed independence") {
    for (const char* s : {"cyclic(6)", "symmetric(4)", "alternating(5)", "sl2(3)",
                          "dihedral(7)", "product(cyclic(3),cyclic(3))"}) {
        CAPTURE(s);
        GroupTable g = build_group(s);
        DegreeMultiset base = irrep_degrees(g, 42);
        CHECK(base.sum_squares() == g.n);
        CHECK(int(base.degrees.size()) == base.class_count);
        CHECK(base.class_count == int(conjugacy_classes(g).size()));
        CHECK(base.degrees.front() == 1);
        for (std::uint64_t seed : {1ull, 7ull, 99ull, 123456789ull})
            CHECK(irrep_degrees(g, seed).degrees == base.degrees);
    }
}

TEST_CASE("registry matches the oracle on every tabulated family") {
    for (const char* s : {"cyclic(9)", "dihedral(6)", "dihedral(9)", "symmetric(5)",
                          "alternating(6)", "sl2(5)", "psl2(5)", "psl2(7)",
                          "product(psl2(7),cyclic(2))"}) {
        CAPTURE(s);
        GroupTable g = build_group(s);
        auto reg = registry_degrees(g);
        REQUIRE(reg.has_value());
        CHECK(*reg == irrep_degrees(g).degrees);
    }
}

TEST_CASE("quasirandomness degree") {
    CHECK(quasirandomness_degree(build_group("cyclic(2)")) == 1);
    CHECK(quasirandomness_degree(build_group("cyclic(6)")) == 1);
    CHECK(quasirandomness_degree(build_group("symmetric(4)")) == 1);
    CHECK(quasirandomness_degree(build_group("alternating(5)")) == 3);
    CHECK(quasirandomness_degree(build_group("sl2(5)")) == 2);
    CHECK(quasirandomness_degree(build_group("psl2(7)")) == 3);
    // Beyond the eigensolver cap the registry supplies the degrees.
    CHECK(quasirandomness_degree(build_group("product(psl2(7),psl2(7))", 30000)) == 3);
    // The one-element group has no nontrivial representation at all.
    CHECK(quasirandomness_degree(build_group("cyclic(1)")) > 1000000);
}

TEST_CASE("registry disagreement with the oracle is an error") {
    GroupTable g = build_group("cyclic(6)");
    g.family = "symmetric(3)"; // same order, different degree multiset
    CHECK_THROWS_WITH_AS(quasirandomness_degree(g), doctest::Contains("disagree"), Error);
}

TEST_CASE("invariant expectations") {
    GroupTable g = build_group("dihedral(3)");
    int n = g.n;
    FunctionGG f = random_uniform_gg(n, 7);

    for (Invariant which : {Invariant::S, Invariant::T, Invariant::ST, Invariant::Full}) {
        CAPTURE(int(which));
        FunctionGG e = invariant_expectation(g, f, which);
        FunctionGG ee = invariant_expectation(g, e, which);
        double worst = 0.0;
        for (std::size_t i = 0; i < e.v.size(); ++i)
            worst = std::max(worst, std::abs(e.v[i] - ee.v[i]));
        CHECK(worst <= 1e-12);                       // idempotent
        CHECK(e.mean() == doctest::Approx(f.mean()).epsilon(1e-12)); // mean preserved
        CHECK(e.l2_norm() <= f.l2_norm() + 1e-12);   // contraction
    }

    SUBCASE("fixed functions are untouched") {
        FunctionGG fy = FunctionGG::zero(n);
        FunctionGG fx = FunctionGG::zero(n);
        FunctionGG fxy = FunctionGG::zero(n);
        Prng rng(3);
        std::vector<double> u(n), w(n);
        for (double& t : u) t = rng.unit();
        for (double& t : w) t = rng.unit();
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                fy.at(x, y) = u[y];
                fx.at(x, y) = u[x];
                fxy.at(x, y) = w[g.op(g.inv[x], y)];
            }
        auto same = [](const FunctionGG& a, const FunctionGG& b) {
            double worst = 0.0;
            for (std::size_t i = 0; i < a.v.size(); ++i)
                worst = std::max(worst, std::abs(a.v[i] - b.v[i]));
            return worst <= 1e-12;
        };
        CHECK(same(invariant_expectation(g, fy, Invariant::S), fy));
        CHECK(same(invariant_expectation(g, fx, Invariant::T), fx));
        CHECK(same(invariant_expectation(g, fxy, Invariant::ST), fxy));
    }

    SUBCASE("two-element worked example: column means") {
        GroupTable c2 = build_group("cyclic(2)");
        FunctionGG h = FunctionGG::zero(2);
        h.at(0, 0) = 1.0;
        FunctionGG e = invariant_expectation(c2, h, Invariant::S);
        CHECK(e.at(0, 0) == doctest::Approx(0.5));
        CHECK(e.at(1, 0) == doctest::Approx(0.5));
        CHECK(e.at(0, 1) == doctest::Approx(0.0));
        CHECK(e.at(1, 1) == doctest::Approx(0.0));
    }
}

TEST_CASE("averaged inner product conventions") {
    RepVector one = rep_on_g(5, std::vector<double>(5, 1.0));
    CHECK(one.norm() == doctest::Approx(1.0));
    CHECK(one.mean() == doctest::Approx(1.0));
    RepVector r = random_unit_rep(RepVector::Domain::G, 60, 9);
    CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-12));
    RepVector r2 = random_unit_rep(RepVector::Domain::G, 60, 9);
    CHECK(r.v == r2.v); // same seed, same vector
    RepVector q = random_unit_rep(RepVector::Domain::GG, 8, 4);
    CHECK(q.dim() == 64);
    CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sign-average inequality over a finite family") {
    SUBCASE("family constant equal to v gives equality") {
        RepVector v = random_unit_rep(RepVector::Domain::G, 12, 5);
        std::vector<RepVector> family(3, v);
        std::vector<double> w = {0.25, 0.5, 0.25};
        BoundCheck c = van_der_corput_check(family, w, v);
        CHECK(c.pass);
        CHECK(c.observed == doctest::Approx(1.0));
        CHECK(c.bound == doctest::Approx(1.0));
    }
    SUBCASE("orthonormal family of size m: 1/m vs 1/sqrt(m)") {
        int m = 8;
        std::vector<RepVector> family;
        for (int i = 0; i < m; ++i) {
            std::vector<double> e(m, 0.0);
            e[i] = std::sqrt(double(m));
            family.push_back(rep_on_g(m, e));
        }
        std::vector<double> w(m, 1.0 / m);
        BoundCheck c = van_der_corput_check(family, w, family[0]);
        CHECK(c.pass);
        CHECK(c.observed == doctest::Approx(1.0 / m));
        CHECK(c.bound == doctest::Approx(1.0 / std::sqrt(double(m))));
    }
    SUBCASE("random families always pass") {
        GroupTable g = build_group("alternating(4)");
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            int m = 3 + int(seed % 4);
            std::vector<RepVector> family;
            for (int i = 0; i < m; ++i)
                family.push_back(random_unit_rep(RepVector::Domain::G, g.n,
                                                 derive_seed(seed, i)));
            std::vector<double> w(m, 1.0 / m);
            BoundCheck c = van_der_corput_check(
                family, w, random_unit_rep(RepVector::Domain::G, g.n, seed + 1000));
            CAPTURE(seed);
            CHECK(c.pass);
        }
    }
    SUBCASE("non-unit v is rejected") {
        RepVector v = rep_on_g(4, {2.0, 2.0, 2.0, 2.0});
        CHECK_THROWS_AS(
            van_der_corput_check({v}, {1.0}, v), Error);
    }
}

TEST_CASE("translation mixing on G") {
    SUBCASE("constant u has zero deviation") {
        GroupTable g = build_group("symmetric(3)");
        RepVector u = rep_on_g(g.n, std::vector<double>(g.n, 3.0));
        RepVector v = random_unit_rep(RepVector::Domain::G, g.n, 2);
        BoundCheck c = rep_mixing_check(g, u, v, 1);
        CHECK(c.observed <= 1e-18);
        CHECK(c.pass);
    }
    SUBCASE("degree-1 bound is vacuous but holds") {
        GroupTable g = build_group("cyclic(8)");
        RepVector u = random_unit_rep(RepVector::Domain::G, g.n, 1);
        RepVector v = random_unit_rep(RepVector::Domain::G, g.n, 2);
        BoundCheck c = rep_mixing_check(g, u, v, 1);
        CHECK(c.vacuous);
        CHECK(c.pass);
    }
    SUBCASE("non-vacuous on a quasirandom group") {
        GroupTable g = build_group("psl2(7)");
        long long d = quasirandomness_degree(g);
        CHECK(d == 3);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            RepVector u = random_unit_rep(RepVector::Domain::G, g.n, derive_seed(seed, 0));
            RepVector v = random_unit_rep(RepVector::Domain::G, g.n, derive_seed(seed, 1));
            BoundCheck c = rep_mixing_check(g, u, v, d);
            CAPTURE(seed);
            CHECK_FALSE(c.vacuous);
            CHECK(c.pass);
            CHECK(c.observed <= 1.0 / 3.0);
            CHECK(c.observed <= 0.05); // typical values are far below the bound
        }
    }
}

TEST_CASE("diagonal tensor projection") {
    SUBCASE("hand-computed spike example") {
        GroupTable g = build_group("cyclic(4)");
        std::vector<double> spike(4, 0.0);
        spike[0] = 2.0; // norm 1 in the averaging convention
        RepVector u = rep_on_g(4, spike);
        BoundCheck c = tensor_projection_check(g, u, u, 1);
        CHECK(c.observed == doctest::Approx(std::sqrt(3.0) / 4.0).epsilon(1e-12));
        CHECK(c.pass);
        CHECK(c.vacuous);
    }
    SUBCASE("constant u gives zero") {
        GroupTable g = build_group("symmetric(3)");
        RepVector u = rep_on_g(g.n, std::vector<double>(g.n, 1.0));
        RepVector v = random_unit_rep(RepVector::Domain::G, g.n, 11);
        BoundCheck c = tensor_projection_check(g, u, v, 1);
        CHECK(c.observed <= 1e-12);
    }
    SUBCASE("non-vacuous pass on alternating(5)") {
        GroupTable g = build_group("alternating(5)");
        long long d = quasirandomness_degree(g);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            RepVector u = random_unit_rep(RepVector::Domain::G, g.n, derive_seed(seed, 5));
            RepVector v = random_unit_rep(RepVector::Domain::G, g.n, derive_seed(seed, 6));
            BoundCheck c = tensor_projection_check(g, u, v, d);
            CAPTURE(seed);
            CHECK_FALSE(c.vacuous);
            CHECK(c.pass);
            CHECK(c.observed <= 1.0 / std::sqrt(3.0));
        }
    }
}

TEST_CASE("two-sided translation mixing on G x G") {
    SUBCASE("constant second factor gives zero deviation") {
        GroupTable g = build_group("symmetric(3)");
        FunctionGG f1 = random_uniform_gg(g.n, 3);
        FunctionGG f2 = FunctionGG::constant(g.n, 0.7);
        BoundCheck c = twisted_mixing_check(g, f1, f2, 1);
        CHECK(c.observed <= 1e-12);
    }
    SUBCASE("two-element checkerboard example") {
        GroupTable g = build_group("cyclic(2)");
        FunctionGG f = FunctionGG::zero(2);
        f.at(0, 0) = 1.0; f.at(0, 1) = -1.0;
        f.at(1, 0) = -1.0; f.at(1, 1) = 1.0;
        BoundCheck c = twisted_mixing_check(g, f, f, 1);
        CHECK(c.observed == doctest::Approx(1.0));
        CHECK(c.bound == doctest::Approx(2.0));
        CHECK(c.vacuous);
        CHECK(c.pass);
    }
    SUBCASE("non-vacuous sign matrices on psl2(7)") {
        GroupTable g = build_group("psl2(7)");
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            FunctionGG f1 = random_pm1_gg(g.n, derive_seed(seed, 0));
            FunctionGG f2 = random_pm1_gg(g.n, derive_seed(seed, 1));
            BoundCheck c = twisted_mixing_check(g, f1, f2, 3);
            CAPTURE(seed);
            CHECK_FALSE(c.vacuous);
            CHECK(c.pass);
            CHECK(c.observed <= 2.0 / std::sqrt(3.0));
        }
    }
}

TEST_CASE("triple convolution form") {
    SUBCASE("constant first factor cancels exactly") {
        GroupTable g = build_group("dihedral(4)");
        std::vector<double> h1(g.n, 1.0), h2(g.n), h12(g.n);
        Prng rng(5);
        for (double& t : h2) t = rng.pm1();
        for (double& t : h12) t = rng.pm1();
        BoundCheck c = triple_convolution_check(g, h1, h2, h12, 1);
        CHECK(c.observed <= 1e-12);
    }
    SUBCASE("three-element hand computation") {
        GroupTable g = build_group("cyclic(3)");
        std::vector<double> h = {1.0, 1.0, -1.0};
        BoundCheck c = triple_convolution_check(g, h, h, h, 1);
        CHECK(c.observed == doctest::Approx(8.0 / 27.0).epsilon(1e-12));
        CHECK(c.pass);
    }
    SUBCASE("non-vacuous pass on psl2(7)") {
        GroupTable g = build_group("psl2(7)");
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Prng rng(derive_seed(seed, 77));
            std::vector<double> h1(g.n), h2(g.n), h12(g.n);
            for (double& t : h1) t = rng.pm1();
            for (double& t : h2) t = rng.pm1();
            for (double& t : h12) t = rng.pm1();
            BoundCheck c = triple_convolution_check(g, h1, h2, h12, 3);
            CAPTURE(seed);
            CHECK_FALSE(c.vacuous);
            CHECK(c.pass);
            CHECK(c.observed <= 1.0 / std::sqrt(3.0));
        }
    }
    SUBCASE("out-of-range values are rejected") {
        GroupTable g = build_group("cyclic(3)");
        std::vector<double> ok(3, 0.5), bad = {1.5, 0.0, 0.0};
        CHECK_THROWS_AS(triple_convolution_check(g, bad, ok, ok, 1), Error);
    }
}
