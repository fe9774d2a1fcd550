#include "qrg/boxnorm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qrg/errors.hpp"
#include "qrg/parallel.hpp"
#include "qrg/rng.hpp"

namespace qrg {

FunctionGG frame_transform(const GroupTable& g, const FunctionGG& f, BoxFrame frame) {
    require(f.n == g.n, "DomainMismatch", "function does not match group order");
    if (frame == BoxFrame::c1_2) return f;
    int n = g.n;
    FunctionGG out(n, 0.0, f.lo, f.hi);
    if (frame == BoxFrame::c1_12) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) out.at(a, b) = f.at(g.op(a, g.inv[b]), a);
    } else { // c12_2
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) out.at(a, b) = f.at(b, g.op(b, a));
    }
    return out;
}

FunctionGG inverse_frame_transform(const GroupTable& g, const FunctionGG& f,
                                   BoxFrame frame) {
    require(f.n == g.n, "DomainMismatch", "function does not match group order");
    if (frame == BoxFrame::c1_2) return f;
    int n = g.n;
    FunctionGG out(n, 0.0, f.lo, f.hi);
    if (frame == BoxFrame::c1_12) {
        // F(a,b) = f(a b^{-1}, a)  <=>  f(x,y) = F(y, x^{-1}y)
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) out.at(x, y) = f.at(y, g.op(g.inv[x], y));
    } else {
        // F(a,b) = f(b, b a)  <=>  f(x,y) = F(x^{-1}y, x)
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) out.at(x, y) = f.at(g.op(g.inv[x], y), x);
    }
    return out;
}

double frame_pairing(const GroupTable& g, const FunctionGG& f, BoxFrame frame,
                     const std::vector<double>& a_signs,
                     const std::vector<double>& b_signs) {
    int n = g.n;
    require(f.n == n && int(a_signs.size()) == n && int(b_signs.size()) == n,
            "DomainMismatch", "pairing needs matching dimensions");
    double s = 0.0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double w;
            switch (frame) {
                case BoxFrame::c1_2: w = a_signs[x] * b_signs[y]; break;
                case BoxFrame::c1_12: w = a_signs[y] * b_signs[g.op(g.inv[x], y)]; break;
                default: w = a_signs[g.op(g.inv[x], y)] * b_signs[x]; break;
            }
            s += f.at(x, y) * w;
        }
    return s / (double(n) * n);
}

namespace {

// Value and optimal second vector for a fixed first vector: the best t is the
// sign of the column marginal (zero maps to +1).
double best_counterpart(const std::vector<double>& m, int n,
                        const std::vector<double>& s, std::vector<double>& t) {
    double total = 0.0;
    for (int b = 0; b < n; ++b) {
        double marg = 0.0;
        for (int a = 0; a < n; ++a) marg += s[a] * m[std::size_t(a) * n + b];
        t[b] = marg < 0.0 ? -1.0 : 1.0;
        total += std::abs(marg);
    }
    return total / (double(n) * n);
}

BoxNormResult exact_product_norm(const std::vector<double>& m, int n) {
    BoxNormResult r;
    r.exact = true;
    // Gray-code walk over sign vectors with s[0] pinned to +1; the marginals
    // are updated in O(n) per step and refreshed from scratch periodically to
    // stop floating-point drift from accumulating.
    std::vector<double> s(n, 1.0), marg(n, 0.0);
    auto refresh = [&]() {
        for (int b = 0; b < n; ++b) {
            double acc = 0.0;
            for (int a = 0; a < n; ++a) acc += s[a] * m[std::size_t(a) * n + b];
            marg[b] = acc;
        }
    };
    refresh();
    auto abs_sum = [&]() {
        double acc = 0.0;
        for (int b = 0; b < n; ++b) acc += std::abs(marg[b]);
        return acc;
    };
    std::uint64_t best_state = 0;
    double best = abs_sum();
    std::uint64_t steps = n > 1 ? (1ull << (n - 1)) : 1;
    for (std::uint64_t k = 1; k < steps; ++k) {
        int a = std::countr_zero(k) + 1; // flipped position in the Gray walk
        s[a] = -s[a];
        const double* row = m.data() + std::size_t(a) * n;
        for (int b = 0; b < n; ++b) marg[b] += 2.0 * s[a] * row[b];
        if ((k & 0x7ff) == 0) refresh();
        double v = abs_sum();
        if (v > best) { best = v; best_state = k ^ (k >> 1); }
    }
    // Rebuild the winning state and recompute its value cleanly.
    for (int a = 1; a < n; ++a)
        s[a] = (best_state >> (a - 1)) & 1ull ? -1.0 : 1.0;
    s[0] = 1.0;
    std::vector<double> t(n, 1.0);
    r.value = best_counterpart(m, n, s, t);
    r.witness_a = std::move(s);
    r.witness_b = std::move(t);
    return r;
}

BoxNormResult heuristic_product_norm(const std::vector<double>& m, int n,
                                     std::uint64_t seed, const BoxNormCaps& caps) {
    struct Attempt {
        double value = -1.0;
        std::vector<double> s, t;
    };
    std::vector<double> mt(std::size_t(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) mt[std::size_t(b) * n + a] = m[std::size_t(a) * n + b];
    std::vector<Attempt> slots(caps.restarts);
    parallel_for(caps.restarts, [&](std::int64_t idx) {
        Prng rng(derive_seed(seed, std::uint64_t(idx)));
        std::vector<double> s(n), t(n, 1.0);
        for (double& x : s) x = rng.pm1();
        double value = best_counterpart(m, n, s, t);
        // Alternate: re-fit s against t, then t against s; each re-fit is
        // optimal for its side, so the value never decreases and a repeated
        // value is a fixpoint.
        for (int it = 0; it < caps.max_alternations; ++it) {
            best_counterpart(mt, n, t, s);
            double v = best_counterpart(m, n, s, t);
            if (v <= value + 1e-15) { value = std::max(value, v); break; }
            value = v;
        }
        slots[idx] = Attempt{value, std::move(s), std::move(t)};
    });
    BoxNormResult r;
    r.exact = false;
    r.restarts_used = caps.restarts;
    int best = 0;
    for (int i = 1; i < caps.restarts; ++i)
        if (slots[i].value > slots[best].value) best = i;
    r.value = slots[best].value;
    r.witness_a = std::move(slots[best].s);
    r.witness_b = std::move(slots[best].t);
    return r;
}

} // namespace

BoxNormResult product_box_norm(const std::vector<double>& m, int n, NormMode mode,
                               std::uint64_t seed, const BoxNormCaps& caps) {
    require(int(m.size()) == n * n && n >= 1, "DomainMismatch",
            "matrix must be n x n with n >= 1");
    BoxNormResult r;
    if (mode == NormMode::exact) {
        require(n <= caps.exact_cap, "ExactCapExceeded",
                "exact box norm enumerates 2^(n-1) sign vectors; n = " +
                    std::to_string(n) + " exceeds cap " + std::to_string(caps.exact_cap));
        r = exact_product_norm(m, n);
    } else {
        require(caps.restarts >= 1, "DomainMismatch", "need at least one restart");
        r = heuristic_product_norm(m, n, seed, caps);
    }
    r.seed = seed;
    return r;
}

BoxNormResult box_norm(const GroupTable& g, const FunctionGG& f, BoxFrame frame,
                       NormMode mode, std::uint64_t seed, const BoxNormCaps& caps) {
    FunctionGG t = frame_transform(g, f, frame);
    BoxNormResult r = product_box_norm(t.v, g.n, mode, seed, caps);
    r.frame = frame;
    return r;
}

} // namespace qrg
