#include "qrg/corners.hpp"

#include <algorithm>
#include <cmath>

#include "qrg/errors.hpp"
#include "qrg/parallel.hpp"

namespace qrg {

CornerCensus corner_census(const GroupTable& g, const SubsetGG& e, PatternKind kind,
                           int cap) {
    require(e.n == g.n, "DomainMismatch", "set does not match group order");
    require(g.n <= cap, "CapExceeded", "order " + std::to_string(g.n) +
                                           " exceeds census cap " + std::to_string(cap));
    int n = g.n;
    int wpr = e.wpr;
    CornerCensus out;
    out.kind = kind;
    out.n = n;
    out.set_size = e.card;
    out.delta = Rational(e.card, 1ll * n * n);
    out.counts.assign(n, 0);

    parallel_for(n, [&](std::int64_t gi) {
        const int* grow = g.mul.data() + std::size_t(gi) * n; // grow[y] = g*y
        std::vector<std::uint64_t> perm(wpr);
        long long cnt = 0;
        for (int x = 0; x < n; ++x) {
            int gx = grow[x];
            const std::uint64_t* a = e.row(x);
            const std::uint64_t* b = e.row(gx);
            const std::uint64_t* src = kind == PatternKind::naive ? a : b;
            // perm holds the bits of g^{-1} * src: bit y is src's bit g*y.
            std::fill(perm.begin(), perm.end(), 0ull);
            for (int y = 0; y < n; ++y) {
                int gy = grow[y];
                perm[y >> 6] |= ((src[gy >> 6] >> (gy & 63)) & 1ull) << (y & 63);
            }
            for (int w = 0; w < wpr; ++w)
                cnt += std::popcount(a[w] & b[w] & perm[w]);
        }
        out.counts[gi] = cnt;
    });
    return out;
}

SubsetG good_set(const CornerCensus& c, double threshold) {
    SubsetG s(c.n);
    long long nn = 1ll * c.n * c.n;
    for (int gi = 0; gi < c.n; ++gi)
        if (ratio_ge(c.counts[gi], nn, threshold)) s.add(gi);
    return s;
}

std::optional<CornerWitness> corner_exists(const GroupTable& g, const SubsetGG& e,
                                           const CornerCensus& c) {
    require(e.n == g.n && c.n == g.n, "DomainMismatch",
            "census, set, and group must share one order");
    for (int gi = 0; gi < g.n; ++gi) {
        if (gi == g.id || c.counts[gi] == 0) continue;
        for (int x = 0; x < g.n; ++x) {
            int gx = g.op(gi, x);
            for (int y = 0; y < g.n; ++y) {
                if (!e.test(x, y) || !e.test(gx, y)) continue;
                bool third = c.kind == PatternKind::bmz ? e.test(gx, g.op(gi, y))
                                                        : e.test(x, g.op(gi, y));
                if (third) return CornerWitness{gi, x, y};
            }
        }
        fail("DomainMismatch", "census count positive but no witness found; "
                               "census does not belong to this set");
    }
    return std::nullopt;
}

TheoremCheck naive_abundance_check(const GroupTable& g, const SubsetGG& e, double eps,
                                   long long D, int cap) {
    require(eps > 0.0, "DomainMismatch", "eps must be positive");
    CornerCensus c = corner_census(g, e, PatternKind::naive, cap);
    TheoremCheck t;
    t.name = "naive-abundance";
    t.epsilon = eps;
    t.delta = c.delta;
    t.D = D;
    double d = c.delta.to_double();
    t.threshold = d * d * d - eps;
    t.good = good_set(c, t.threshold);
    t.measure = t.good.measure();
    t.raw_bound = 1.0 - 2.0 * std::sqrt(3.0) * std::pow(double(D), -0.25) / eps;
    t.bound = std::clamp(t.raw_bound, 0.0, 1.0);
    t.vacuous = t.raw_bound <= 0.0;
    t.pass = ratio_ge(t.good.card, g.n, t.bound);
    t.hypothesis_evaluated = true; // the guarantee has no side condition on D
    t.hypothesis_met = true;
    t.observational = false;
    return t;
}

TheoremCheck bmz_abundance_check(const GroupTable& g, const SubsetGG& e, double eps,
                                 long long D, int cap) {
    require(eps > 0.0, "DomainMismatch", "eps must be positive");
    CornerCensus c = corner_census(g, e, PatternKind::bmz, cap);
    TheoremCheck t;
    t.name = "bmz-abundance";
    t.epsilon = eps;
    t.delta = c.delta;
    t.D = D;
    double d = c.delta.to_double();
    t.threshold = d * d * d * d - eps;
    t.good = good_set(c, t.threshold);
    t.measure = t.good.measure();
    t.raw_bound = 1.0 - eps;
    t.bound = std::clamp(t.raw_bound, 0.0, 1.0);
    t.vacuous = t.raw_bound <= 0.0;
    t.pass = ratio_ge(t.good.card, g.n, t.bound);
    // The guarantee needs a lower bound on D in terms of decomposition cell
    // counts; without a decomposition in hand the hypothesis stays unevaluated
    // and the verdict is a report, not an assertion.
    t.hypothesis_evaluated = false;
    t.hypothesis_met = false;
    t.observational = true;
    return t;
}

BoundCheck naive_form_decay_check(const GroupTable& g, const FunctionGG& f1,
                                  const FunctionGG& f2, const FunctionGG& f3,
                                  ZeroedFactor which, long long D) {
    require(f1.n == g.n && f2.n == g.n && f3.n == g.n, "DomainMismatch",
            "functions must live on G x G");
    for (const FunctionGG* f : {&f1, &f2, &f3})
        require(f->linf_norm() <= 1.0 + 1e-12, "RangeViolation",
                "function values must lie in [-1,1]");
    {
        const FunctionGG& target = which == ZeroedFactor::f2_rows ? f2 : f3;
        Invariant sigma = which == ZeroedFactor::f2_rows ? Invariant::S : Invariant::T;
        FunctionGG e = invariant_expectation(g, target, sigma);
        if (e.linf_norm() > 1e-9)
            fail("PreconditionViolated",
                 "designated conditional expectation is not zero (sup = " +
                     std::to_string(e.linf_norm()) + ")");
    }

    int n = g.n;
    std::vector<double> vals(n);
    parallel_for(n, [&](std::int64_t gi) {
        const int* grow = g.mul.data() + std::size_t(gi) * n;
        double s = 0.0;
        for (int x = 0; x < n; ++x) {
            const double* r1 = f1.v.data() + std::size_t(x) * n;
            const double* r2 = f2.v.data() + std::size_t(grow[x]) * n;
            const double* r3 = f3.v.data() + std::size_t(x) * n;
            double t = 0.0;
            for (int y = 0; y < n; ++y) t += r1[y] * r2[y] * r3[grow[y]];
            s += t;
        }
        vals[gi] = std::abs(s / (double(n) * n));
    });
    double obs = 0.0;
    for (double v : vals) obs += v;
    obs /= double(n);

    BoundCheck c;
    c.name = "naive-form-decay";
    c.observed = obs;
    c.bound = std::sqrt(3.0) * std::pow(double(D), -0.25);
    c.vacuous = c.bound >= 1.0;
    c.add_param("D", double(D));
    c.add_param("zeroed", which == ZeroedFactor::f2_rows ? "f2_rows" : "f3_cols");
    c.finish();
    return c;
}

} // namespace qrg
