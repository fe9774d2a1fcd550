#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "qrg/errors.hpp"
#include "qrg/parallel.hpp"
#include "qrg/rng.hpp"
#include "qrg/syndetic.hpp"

using namespace qrg;

namespace {

RepVector point_mass_rep(int n, int at) {
    std::vector<double> v(std::size_t(n), 0.0);
    v[std::size_t(at)] = std::sqrt(double(n));
    return rep_on_g(n, v);
}

FunctionGG as_function(const RepVector& r) {
    FunctionGG f(r.n, 0.0, -100.0, 100.0);
    f.v = r.v;
    return f;
}

// <u, pi^g v> for every g by plain loops.
std::vector<double> oracle_action_ip(const GroupTable& g, ActionKind a,
                                     const RepVector& u, const RepVector& v) {
    int n = g.n;
    std::vector<double> ip(std::size_t(n), 0.0);
    for (int s = 0; s < n; ++s) {
        double acc = 0.0;
        if (a == ActionKind::regular) {
            for (int x = 0; x < n; ++x) acc += u.v[std::size_t(x)] * v.v[std::size_t(g.op(s, x))];
            ip[std::size_t(s)] = acc / n;
            continue;
        }
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                int xs = a == ActionKind::T ? x : g.op(s, x);
                int ys = a == ActionKind::S ? y : g.op(s, y);
                acc += u.v[std::size_t(x) * n + y] * v.v[std::size_t(xs) * n + ys];
            }
        ip[std::size_t(s)] = acc / (double(n) * n);
    }
    return ip;
}

// <Pu, Pv> through the independently implemented invariant expectations.
double oracle_proj(const GroupTable& g, ActionKind a, const RepVector& u,
                   const RepVector& v) {
    if (a == ActionKind::regular) return u.mean() * v.mean();
    Invariant which = a == ActionKind::S   ? Invariant::S
                      : a == ActionKind::T ? Invariant::T
                                           : Invariant::ST;
    FunctionGG pu = invariant_expectation(g, as_function(u), which);
    FunctionGG pv = invariant_expectation(g, as_function(v), which);
    return inner_gg(pu, pv);
}

bool has_event(const std::vector<std::string>& events, const std::string& needle) {
    for (const std::string& e : events)
        if (e.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("anti-neighbourhood deviations match plain-loop recomputation") {
    GroupTable g = build_group("dihedral(3)");
    int n = g.n;
    int tag = 0;
    for (ActionKind a :
         {ActionKind::regular, ActionKind::S, ActionKind::T, ActionKind::ST}) {
        ++tag;
        AntiNbhdSpec spec;
        spec.action = a;
        if (a == ActionKind::regular) {
            spec.u = random_unit_rep(RepVector::Domain::G, n, 7);
            spec.v = random_unit_rep(RepVector::Domain::G, n, 8);
        } else {
            spec.u = rep_on_gg(n, random_uniform_gg(n, 100 + 2 * tag));
            spec.v = rep_on_gg(n, random_uniform_gg(n, 101 + 2 * tag));
        }
        spec.eps = 0.25;
        AntiNbhd r = anti_neighbourhood(g, spec, 1);
        std::vector<double> ip = oracle_action_ip(g, a, spec.u, spec.v);
        double proj = oracle_proj(g, a, spec.u, spec.v);
        CHECK(std::abs(r.projection_term - proj) < 1e-12);
        REQUIRE(int(r.deviations.size()) == n);
        for (int s = 0; s < n; ++s) {
            CHECK(std::abs(r.deviations[std::size_t(s)] - std::abs(ip[std::size_t(s)] - proj)) <
                  1e-12);
            CHECK(r.set.test(s) == (r.deviations[std::size_t(s)] < spec.eps - 1e-12));
        }
    }
}

TEST_CASE("anti-neighbourhood of a constant vector is the whole group") {
    GroupTable g = build_group("cyclic(7)");
    AntiNbhdSpec spec;
    spec.action = ActionKind::regular;
    spec.u = rep_on_g(7, std::vector<double>(7, 1.0));
    spec.v = random_unit_rep(RepVector::Domain::G, 7, 11);
    spec.eps = 1e-6;
    AntiNbhd r = anti_neighbourhood(g, spec, 1);
    CHECK(r.set.card == 7);
    for (double d : r.deviations) CHECK(d < 1e-12);
}

TEST_CASE("anti-neighbourhood of the scaled point mass excludes only the identity") {
    for (int n : {5, 12}) {
        GroupTable g = build_group("cyclic(" + std::to_string(n) + ")");
        AntiNbhdSpec spec;
        spec.action = ActionKind::regular;
        spec.u = point_mass_rep(n, 0);
        spec.v = spec.u;
        spec.eps = 0.5;
        AntiNbhd r = anti_neighbourhood(g, spec, 1);
        CHECK(r.set.card == n - 1);
        CHECK(!r.set.test(g.id));
        CHECK(r.deviations[std::size_t(g.id)] == doctest::Approx(1.0 - 1.0 / n));
        for (int s = 1; s < n; ++s)
            CHECK(r.deviations[std::size_t(s)] == doctest::Approx(1.0 / n));
        // At D = 1 and eps = 1/2 the guarantee is below zero, hence vacuous.
        CHECK(r.measure_check.vacuous);
        CHECK(std::abs(spec.u.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("anti-neighbourhood measure bound on a mixing group") {
    GroupTable g = build_group("psl2(7)");
    const double eps = 0.8;
    const double expect = 1.0 - 1.0 / (3.0 * eps * eps);
    for (int t = 0; t < 5; ++t) {
        AntiNbhdSpec spec;
        spec.action = ActionKind::regular;
        spec.u = random_unit_rep(RepVector::Domain::G, g.n, derive_seed(500, t));
        spec.v = random_unit_rep(RepVector::Domain::G, g.n, derive_seed(501, t));
        spec.eps = eps;
        AntiNbhd r = anti_neighbourhood(g, spec, 3);
        CHECK(!r.measure_check.vacuous);
        CHECK(!r.measure_check.observational);
        CHECK(r.measure_check.bound == doctest::Approx(expect));
        CHECK(r.measure_check.pass);
        CHECK(r.measure_check.observed >= 0.479);
    }
}

TEST_CASE("anti-neighbourhood input validation") {
    GroupTable g = build_group("cyclic(6)");
    AntiNbhdSpec spec;
    spec.action = ActionKind::regular;
    spec.u = rep_on_gg(6, random_uniform_gg(6, 1));
    spec.v = spec.u;
    spec.eps = 0.5;
    CHECK_THROWS_WITH_AS(anti_neighbourhood(g, spec, 1), doctest::Contains("DomainMismatch"),
                         Error);

    spec.action = ActionKind::ST;
    spec.u = random_unit_rep(RepVector::Domain::G, 6, 2);
    spec.v = spec.u;
    CHECK_THROWS_WITH_AS(anti_neighbourhood(g, spec, 1), doctest::Contains("DomainMismatch"),
                         Error);

    GroupTable h = build_group("cyclic(8)");
    spec.action = ActionKind::regular;
    CHECK_THROWS_WITH_AS(anti_neighbourhood(h, spec, 1), doctest::Contains("DomainMismatch"),
                         Error);

    // Non-unit vectors keep the set but mark the measure bound as skipped.
    spec.u = rep_on_g(6, std::vector<double>(6, 0.5));
    spec.v = rep_on_g(6, std::vector<double>(6, 0.5));
    AntiNbhd r = anti_neighbourhood(g, spec, 1);
    CHECK(r.set.card == 6);
    CHECK(r.measure_check.vacuous);
    CHECK(r.measure_check.observational);
}

TEST_CASE("almost-orthogonal energy bound") {
    // Orthonormal point masses on cyclic(4).
    int n = 4;
    std::vector<RepVector> basis;
    for (int i = 0; i < n; ++i) basis.push_back(point_mass_rep(n, i));

    BoundCheck c = almost_orthogonal_bound(basis[0], basis);
    CHECK(c.observed == doctest::Approx(1.0));
    CHECK(c.bound == doctest::Approx(2.0));
    CHECK(c.pass);

    // Bessel for a random unit vector against an orthonormal family.
    RepVector v = random_unit_rep(RepVector::Domain::G, n, 21);
    BoundCheck b = almost_orthogonal_bound(v, basis);
    CHECK(b.observed <= 1.0 + 1e-9);
    CHECK(b.pass);

    // Empty family: the energy sum is zero.
    BoundCheck e = almost_orthogonal_bound(v, {});
    CHECK(e.observed == 0.0);
    CHECK(e.pass);

    // Violations.
    RepVector half = rep_on_g(n, std::vector<double>(4, 0.5));
    CHECK_THROWS_WITH_AS(almost_orthogonal_bound(half, basis), doctest::Contains("NotUnit"),
                         Error);
    CHECK_THROWS_WITH_AS(almost_orthogonal_bound(basis[0], {half}),
                         doctest::Contains("NotUnit"), Error);
    CHECK_THROWS_WITH_AS(almost_orthogonal_bound(v, {basis[0], basis[0]}),
                         doctest::Contains("PairwiseConditionViolated"), Error);
    RepVector gg = rep_on_gg(n, random_uniform_gg(n, 5));
    CHECK_THROWS_WITH_AS(almost_orthogonal_bound(v, {gg}),
                         doctest::Contains("DomainMismatch"), Error);
}

TEST_CASE("near-orthogonal index selection") {
    // k = 1, m = 2, u^1 = v: the threshold is sqrt(2k/m) = 1, so the first
    // index qualifies exactly at equality of the inner product.
    int n = 4;
    RepVector ones = rep_on_g(n, std::vector<double>(4, 1.0));
    std::vector<double> alt = {1.0, -1.0, 1.0, -1.0};
    RepVector sign = rep_on_g(n, alt);
    CHECK(select_near_orthogonal_index({ones}, {{ones, sign}}) == 0);

    // A selector correlated with the first two of eight orthonormal vectors
    // must skip to the third.
    int m = 8;
    std::vector<RepVector> basis;
    for (int i = 0; i < m; ++i) basis.push_back(point_mass_rep(m, i));
    std::vector<double> mix(std::size_t(m), 0.0);
    mix[0] = 0.8 * std::sqrt(double(m));
    mix[1] = 0.6 * std::sqrt(double(m));
    RepVector v = rep_on_g(m, mix);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    CHECK(select_near_orthogonal_index({v}, {basis}) == 2);

    // Two selectors with a shared family size.
    RepVector w = basis[5];
    CHECK(select_near_orthogonal_index({v, w}, {basis, basis}) == 2);

    // Ragged family sizes are rejected.
    CHECK_THROWS_WITH_AS(
        select_near_orthogonal_index({v, w}, {basis, {basis[0], basis[1]}}),
        doctest::Contains("DomainMismatch"), Error);
}

TEST_CASE("syndetic covers of full set, singleton, and punctured group") {
    for (CoverMode mode : {CoverMode::greedy, CoverMode::exact}) {
        GroupTable g = build_group("cyclic(6)");

        SyndeticityCertificate full = syndetic_cover(g, SubsetG::full(6), mode, 6);
        CHECK(full.K == 1);
        CHECK(full.coverage);
        CHECK(full.lower_bound == 1);
        CHECK(certificate_valid(g, SubsetG::full(6), full));

        SubsetG id_only(6);
        id_only.add(g.id);
        SyndeticityCertificate point = syndetic_cover(g, id_only, mode, 6);
        CHECK(point.K == 6);
        CHECK(point.coverage);
        CHECK(point.lower_bound == 6);
        CHECK(certificate_valid(g, id_only, point));
    }

    // G minus the identity needs exactly two translates on every cyclic(n).
    for (int n : {3, 5, 8, 12}) {
        GroupTable g = build_group("cyclic(" + std::to_string(n) + ")");
        SubsetG b = SubsetG::full(n);
        b.remove(g.id);
        SyndeticityCertificate gr = syndetic_cover(g, b, CoverMode::greedy, 64);
        SyndeticityCertificate ex = syndetic_cover(g, b, CoverMode::exact, 64);
        CHECK(gr.K == 2);
        CHECK(ex.K == 2);
        CHECK(gr.coverage);
        CHECK(ex.coverage);
        CHECK(certificate_valid(g, b, gr));
        CHECK(certificate_valid(g, b, ex));
        CHECK(gr.translators == std::vector<int>{0, 1});
        CHECK(ex.translators == std::vector<int>{0, 1});
    }

    // Tampered certificates fail validation.
    GroupTable g = build_group("cyclic(5)");
    SubsetG b = SubsetG::full(5);
    b.remove(g.id);
    SyndeticityCertificate cert = syndetic_cover(g, b, CoverMode::greedy, 64);
    SyndeticityCertificate bad = cert;
    bad.coverage = !bad.coverage;
    CHECK(!certificate_valid(g, b, bad));
    bad = cert;
    bad.translators.pop_back();
    CHECK(!certificate_valid(g, b, bad));
    bad = cert;
    bad.lower_bound += 1;
    CHECK(!certificate_valid(g, b, bad));

    // Budget exhaustion reports partial coverage instead of throwing.
    SubsetG id_only(5);
    id_only.add(g.id);
    SyndeticityCertificate partial = syndetic_cover(g, id_only, CoverMode::greedy, 3);
    CHECK(partial.K == 3);
    CHECK(!partial.coverage);
    CHECK(certificate_valid(g, id_only, partial));
    SyndeticityCertificate none = syndetic_cover(g, id_only, CoverMode::exact, 3);
    CHECK(none.K == 0);
    CHECK(!none.coverage);
    CHECK(certificate_valid(g, id_only, none));

    CHECK_THROWS_WITH_AS(syndetic_cover(g, SubsetG(5), CoverMode::greedy, 5),
                         doctest::Contains("EmptySet"), Error);
}

TEST_CASE("randomized covering witness on the punctured cyclic group") {
    GroupTable g = build_group("cyclic(12)");
    AntiNbhdSpec spec;
    spec.action = ActionKind::regular;
    spec.u = point_mass_rep(12, 0);
    spec.v = spec.u;
    spec.eps = 0.5;

    // The pair condition at 1/K^2 = 1/4 accepts exactly the tuples with
    // distinct entries, and two distinct translates of G minus a point cover.
    BasicSyndeticWitness w = basic_syndetic_witness(g, {spec}, 2, 1ll, 42, 1000);
    CHECK(w.found);
    REQUIRE(w.h.size() == 2);
    CHECK(w.h[0] != w.h[1]);
    CHECK(w.A.card == 11);
    CHECK(!w.A.test(g.id));
    CHECK(w.coverage);
    CHECK(w.formula_K == doctest::Approx(9.0));
    CHECK(w.d_required == doctest::Approx(65.0));
    CHECK(!w.hypothesis_met);
    CHECK(!w.notes.empty());

    // K = 1 has no pair condition; a constant spec makes A the whole group.
    AntiNbhdSpec c;
    c.action = ActionKind::regular;
    c.u = rep_on_g(12, std::vector<double>(12, 1.0));
    c.v = random_unit_rep(RepVector::Domain::G, 12, 3);
    c.eps = 0.5;
    BasicSyndeticWitness w1 = basic_syndetic_witness(g, {c}, 1, 1ll, 7, 10);
    CHECK(w1.found);
    CHECK(w1.attempts == 1);
    CHECK(w1.A.card == 12);
    CHECK(w1.coverage);

    // At K = 4 the pair tolerance 1/16 is below the off-identity deviation
    // 1/12, so no tuple can ever qualify: reported, not thrown.
    BasicSyndeticWitness w4 = basic_syndetic_witness(g, {spec}, 4, 1ll, 42, 5);
    CHECK(!w4.found);
    CHECK(w4.attempts == 5);
    CHECK(!w4.coverage);
    CHECK(!w4.notes.empty());

    AntiNbhdSpec other = spec;
    other.eps = 0.25;
    CHECK_THROWS_WITH_AS(basic_syndetic_witness(g, {spec, other}, 2, 1ll, 42, 5),
                         doctest::Contains("DomainMismatch"), Error);
}

TEST_CASE("witness tuple pipeline on degenerate inputs") {
    GroupTable g = build_group("cyclic(6)");
    int n = g.n;
    FunctionGG z = FunctionGG::zero(n);

    // All-zero random parts: the all-small event holds for every tuple, the
    // auxiliary anti-neighbourhoods are everything, and both shift sets fill.
    PipelineWitness w = kill_random_f2_pipeline(g, z, z, z, z, z, z, 0.9, 1ll,
                                                PipelineCaps{}, 42);
    CHECK(w.found);
    CHECK(w.attempts == 1);
    CHECK(w.k == 5);
    CHECK(w.eta == doctest::Approx(0.05));
    REQUIRE(w.aux2.size() == 10);
    REQUIRE(w.aux3.size() == 10);
    CHECK(w.E.card == n);
    CHECK(w.C2.card == n);
    CHECK(w.C3.card == n);
    CHECK(w.containment);
    CHECK(w.pre2.pass);
    CHECK(w.pre3.pass);
    CHECK(!w.pre2.observational);
    CHECK(has_event(w.notes, "tolerance floored"));

    // eps >= 2 collapses the witness tuple to a single element.
    PipelineWitness w1 = kill_random_f2_pipeline(g, random_pm1_gg(n, 1), random_pm1_gg(n, 2),
                                                 random_pm1_gg(n, 3), random_pm1_gg(n, 4),
                                                 random_pm1_gg(n, 5), random_pm1_gg(n, 6),
                                                 2.5, 1ll, PipelineCaps{}, 43);
    CHECK(w1.found);
    CHECK(w1.k == 1);
    CHECK(w1.aux2.empty());
    CHECK(w1.E.card == n);
    CHECK(w1.C2.card == n);
    CHECK(w1.containment);

    // A constant middle function keeps every paired conditional-expectation
    // norm at one, so the sampling budget runs out.
    PipelineCaps tight;
    tight.max_attempts = 3;
    CHECK_THROWS_WITH_AS(
        kill_random_f2_pipeline(g, z, FunctionGG::constant(n, 1.0), z, z, z, z, 1.0, 1ll,
                                tight, 42),
        doctest::Contains("NoWitnessTuple"), Error);

    FunctionGG big = FunctionGG(n, 1.5, -2.0, 2.0);
    CHECK_THROWS_WITH_AS(
        kill_random_f2_pipeline(g, big, z, z, z, z, z, 1.0, 1ll, PipelineCaps{}, 42),
        doctest::Contains("RangeViolation"), Error);
}

TEST_CASE("witness tuple pipeline aux identity") {
    GroupTable g = build_group("cyclic(12)");
    int n = g.n;
    FunctionGG z = FunctionGG::zero(n);
    FunctionGG f22 = random_pm1_gg(n, 31), f23 = random_pm1_gg(n, 32);
    FunctionGG f32 = random_pm1_gg(n, 33), f33 = random_pm1_gg(n, 34);
    PipelineWitness w =
        kill_random_f2_pipeline(g, z, f22, f23, z, f32, f33, 1.0, 1ll, PipelineCaps{}, 42);
    CHECK(w.found);
    CHECK(w.k == 4);
    REQUIRE(w.aux2.size() == 6);
    CHECK(w.C2.card == n); // zero first factor kills the triple form
    CHECK(w.C3.card == n);
    CHECK(w.containment);

    // <u_{h_i g}, u_{h_j g}> = <F2_ij, T^g F3_ij> for u_h(x,y) = f2(hx,y) f3(hx,hy),
    // the identity behind intersecting T-action anti-neighbourhoods of the
    // auxiliary products.
    auto check_pair = [&](const AuxPair& ap, const FunctionGG& f2, const FunctionGG& f3,
                          int s) {
        int hi = w.h[std::size_t(ap.i)], hj = w.h[std::size_t(ap.j)];
        int his = g.op(hi, s), hjs = g.op(hj, s);
        double lhs = 0.0, rhs = 0.0;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                double ui = f2.at(g.op(his, x), y) * f3.at(g.op(his, x), g.op(his, y));
                double uj = f2.at(g.op(hjs, x), y) * f3.at(g.op(hjs, x), g.op(hjs, y));
                lhs += ui * uj;
                rhs += ap.F2.at(x, y) * ap.F3.at(x, g.op(s, y));
            }
        CHECK(std::abs(lhs - rhs) / (double(n) * n) < 1e-12);
    };
    for (std::size_t p : {std::size_t(0), std::size_t(3)})
        for (int s : {0, 5}) {
            check_pair(w.aux2[p], f22, f23, s);
            check_pair(w.aux3[p], f32, f33, s);
        }
}

TEST_CASE("staged syndeticity run on the full square") {
    GroupTable g = build_group("cyclic(12)");
    SubsetGG E = SubsetGG::full(12);
    TheoremDReport r =
        theorem_D_pipeline(g, E, 0.45, 1ll, PipelineCaps{}, RegularityCaps{}, 42);

    CHECK(r.k == 6);
    CHECK(r.eta == doctest::Approx(0.05));
    CHECK(r.eta_prime == doctest::Approx(0.075));
    CHECK(r.M2 == 1);
    CHECK(r.M3 == 1);
    CHECK(r.delta == Rational(1, 1));

    CHECK(r.witness.found);
    CHECK(r.witness.E.card == 12);
    CHECK(r.C1.card == 12);
    CHECK(r.C2.card == 12);
    CHECK(r.C3.card == 12);
    CHECK(r.C.card == 12);
    CHECK(r.E_prime.card == 12);
    CHECK(r.E_dprime.card == 12);
    CHECK(r.pairs_used == 1);
    CHECK(!r.pairs_capped);

    REQUIRE(r.checks.size() == 7);
    CHECK(r.checks[0].name == "precondition-norm-(1,2)");
    CHECK(r.checks[1].name == "precondition-norm-(12,2)");
    CHECK(r.checks[2].name == "e-prime-in-c1");
    CHECK(r.checks[3].name == "final-containment");
    CHECK(r.checks[4].name == "triple-threshold-containment");
    CHECK(r.checks[5].name == "triple-threshold-tight");
    CHECK(r.checks[6].name == "cover-certificate");
    for (int i : {0, 1, 2, 3, 4, 5}) CHECK(r.checks[std::size_t(i)].pass);
    CHECK(!r.checks[2].observational); // eta' unfloored, exact zero residual
    CHECK(!r.checks[3].observational);
    CHECK(!r.checks[4].observational);
    CHECK(r.checks[5].observational);
    CHECK(r.checks[6].observational);

    CHECK(r.cert.K == 1);
    CHECK(r.cert.coverage);
    CHECK(r.cert.translators == std::vector<int>{0});
    CHECK(certificate_valid(g, r.C, r.cert));
    CHECK(r.measure_C == Rational(1, 1));
    CHECK(r.B.card == 12);
    CHECK(r.K0 == doctest::Approx(62401.0));
    CHECK(r.all_nonvacuous_pass);

    CHECK(has_event(r.cap_events, "witness size capped"));
    CHECK(has_event(r.cap_events, "coarse tolerance floored"));
    CHECK(has_event(r.cap_events, "cover size capped"));
}

TEST_CASE("staged syndeticity run on the empty set") {
    GroupTable g = build_group("cyclic(9)");
    SubsetGG E(9);
    TheoremDReport r =
        theorem_D_pipeline(g, E, 0.3, 1ll, PipelineCaps{}, RegularityCaps{}, 42);
    CHECK(r.delta == Rational(0, 1));
    CHECK(r.C.card == 9);
    CHECK(r.pairs_used == 0);
    CHECK(r.E_prime.card == 9);
    CHECK(r.eta_prime == doctest::Approx(0.05));
    CHECK(!r.checks[2].observational); // no summand pairs, certified residual
    CHECK(r.cert.K == 1);
    CHECK(r.cert.coverage);
    CHECK(r.B.card == 9);
    CHECK(r.all_nonvacuous_pass);
}

TEST_CASE("staged syndeticity run determinism across threads") {
    GroupTable g = build_group("cyclic(12)");
    SubsetGG E = random_subset_gg(12, 0.4, 99);
    int saved = default_threads();
    set_default_threads(1);
    TheoremDReport a =
        theorem_D_pipeline(g, E, 0.45, 1ll, PipelineCaps{}, RegularityCaps{}, 42);
    set_default_threads(4);
    TheoremDReport b =
        theorem_D_pipeline(g, E, 0.45, 1ll, PipelineCaps{}, RegularityCaps{}, 42);
    set_default_threads(saved);

    CHECK(a.witness.found);
    CHECK(a.witness.h == b.witness.h);
    CHECK(a.C.bits == b.C.bits);
    CHECK(a.E_prime.bits == b.E_prime.bits);
    CHECK(a.E_dprime.bits == b.E_dprime.bits);
    CHECK(a.cert.translators == b.cert.translators);
    CHECK(a.measure_C == b.measure_C);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        CHECK(a.checks[i].observed == b.checks[i].observed);
        CHECK(a.checks[i].pass == b.checks[i].pass);
    }

    // The census comparison against the structured triple form plus the
    // three small error terms is unconditional arithmetic: it must pass.
    CHECK(a.checks[4].name == "triple-threshold-containment");
    CHECK(a.checks[4].pass);
    CHECK(!a.checks[4].observational);
    CHECK(a.all_nonvacuous_pass);
}

TEST_CASE("staged run and witness input validation") {
    GroupTable g = build_group("cyclic(6)");
    SubsetGG E = SubsetGG::full(6);
    for (double bad : {0.0, 1.0, 1.5})
        CHECK_THROWS_WITH_AS(theorem_D_pipeline(g, E, bad, 1ll, PipelineCaps{},
                                                RegularityCaps{}, 42),
                             doctest::Contains("DomainMismatch"), Error);
    SubsetGG wrong(5);
    CHECK_THROWS_WITH_AS(theorem_D_pipeline(g, wrong, 0.4, 1ll, PipelineCaps{},
                                            RegularityCaps{}, 42),
                         doctest::Contains("DomainMismatch"), Error);
    CHECK_THROWS_WITH_AS(basic_syndetic_witness(g, {}, 2, 1ll, 42, 5),
                         doctest::Contains("DomainMismatch"), Error);
}
