#pragma once

// Independent reference implementations used only by the tests.  Each oracle
// recomputes a quantity with the most naive method available so that the
// optimized library kernels can be checked against it on small instances.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "qrg/gg.hpp"
#include "qrg/group.hpp"

namespace qrg::testing {

// Per-shift corner counts by plain triple membership tests.
// naive pattern: {(x,y), (gx,y), (x,gy)}; bmz pattern: {(x,y), (gx,y), (gx,gy)}.
inline std::vector<long long> oracle_census(const GroupTable& g, const SubsetGG& e,
                                            bool bmz) {
    int n = g.n;
    std::vector<long long> counts(n, 0);
    for (int s = 0; s < n; ++s)
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                if (!e.test(x, y)) continue;
                if (!e.test(g.op(s, x), y)) continue;
                bool third = bmz ? e.test(g.op(s, x), g.op(s, y)) : e.test(x, g.op(s, y));
                if (third) ++counts[s];
            }
    return counts;
}

// Per-shift averaged triple product by plain loops:
//   T(g) = avg_{x,y} a(x,y) b(gx,y) c(gx,gy).
inline std::vector<double> oracle_triple_form(const GroupTable& g, const FunctionGG& a,
                                              const FunctionGG& b, const FunctionGG& c) {
    int n = g.n;
    std::vector<double> out(n, 0.0);
    for (int s = 0; s < n; ++s) {
        double acc = 0.0;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                acc += a.at(x, y) * b.at(g.op(s, x), y) * c.at(g.op(s, x), g.op(s, y));
        out[s] = acc / (double(n) * n);
    }
    return out;
}

// Exact product box norm of an n x n matrix under the averaging measure:
//   max over signs s,t in {-1,+1}^n of (1/n^2) sum_{a,b} s_a t_b F(a,b).
// Enumerates all sign vectors s; the optimal t is the sign of the b-marginal.
// Usable up to n ~ 14.
inline double oracle_box_norm(const std::vector<double>& f, int n) {
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        double total = 0.0;
        for (int b = 0; b < n; ++b) {
            double m = 0.0;
            for (int a = 0; a < n; ++a)
                m += ((mask >> a) & 1ull) ? -f[std::size_t(a) * n + b]
                                          : f[std::size_t(a) * n + b];
            total += std::abs(m);
        }
        best = std::max(best, total / (double(n) * n));
    }
    return best;
}

} // namespace qrg::testing
