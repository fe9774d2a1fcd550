#pragma once

// Subsets of and real functions on the square G x G, with the uniform
// probability measure.  Integrals are averages: a constant function c has mean
// c and L2 norm |c|, so the theoretically clean normalizations carry over
// verbatim.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qrg/bitset.hpp"
#include "qrg/errors.hpp"
#include "qrg/group.hpp"
#include "qrg/rational.hpp"

namespace qrg {

struct FunctionGG;

struct SubsetGG {
    int n = 0;
    int wpr = 0; // words per row
    std::vector<std::uint64_t> bits;
    long long card = 0;

    SubsetGG() = default;
    explicit SubsetGG(int n_) : n(n_), wpr((n_ + 63) / 64), bits(std::size_t(n_) * wpr, 0ull) {}

    const std::uint64_t* row(int x) const { return bits.data() + std::size_t(x) * wpr; }
    std::uint64_t* row(int x) { return bits.data() + std::size_t(x) * wpr; }

    bool test(int x, int y) const { return (row(x)[y >> 6] >> (y & 63)) & 1ull; }
    void set(int x, int y) {
        std::uint64_t& w = row(x)[y >> 6];
        std::uint64_t m = 1ull << (y & 63);
        if (!(w & m)) { w |= m; ++card; }
    }
    void reset(int x, int y) {
        std::uint64_t& w = row(x)[y >> 6];
        std::uint64_t m = 1ull << (y & 63);
        if (w & m) { w &= ~m; --card; }
    }

    void recount() {
        long long c = 0;
        for (std::uint64_t w : bits) c += std::popcount(w);
        card = c;
    }

    static SubsetGG full(int n) {
        SubsetGG s(n);
        for (int x = 0; x < n; ++x) {
            for (int w = 0; w < s.wpr; ++w) s.row(x)[w] = ~0ull;
            if (n % 64 != 0) s.row(x)[s.wpr - 1] &= (~0ull) >> (64 - n % 64);
        }
        s.card = 1ll * n * n;
        return s;
    }

    Rational density() const { return Rational(card, 1ll * n * n); }

    FunctionGG indicator() const;
};

struct FunctionGG {
    int n = 0;
    std::vector<double> v;
    double lo = -1.0, hi = 1.0; // declared range

    FunctionGG() = default;
    FunctionGG(int n_, double fill, double lo_, double hi_)
        : n(n_), v(std::size_t(n_) * n_, fill), lo(lo_), hi(hi_) {}

    static FunctionGG zero(int n) { return FunctionGG(n, 0.0, -1.0, 1.0); }
    static FunctionGG constant(int n, double c) { return FunctionGG(n, c, c, c); }

    double at(int x, int y) const { return v[std::size_t(x) * n + y]; }
    double& at(int x, int y) { return v[std::size_t(x) * n + y]; }

    double mean() const {
        double s = 0.0;
        for (double x : v) s += x;
        return s / double(v.size());
    }
    double l2_norm() const {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s / double(v.size()));
    }
    double linf_norm() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }

    // Entries must sit inside the declared range up to tol.
    void check_range(double tol = 1e-12) const {
        for (double x : v)
            if (x < lo - tol || x > hi + tol)
                fail("RangeViolation", "function value " + std::to_string(x) +
                                           " outside declared range");
    }
};

inline double inner_gg(const FunctionGG& a, const FunctionGG& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
    return s / double(a.v.size());
}

// ---- generators ----

// Independent Bernoulli(delta) per cell, row-major scan order.
SubsetGG random_subset_gg(int n, double delta, std::uint64_t seed = 42);

// U x V as a subset of G x G.
SubsetGG product_subset_gg(const SubsetG& u, const SubsetG& v);

// Union of translation graphs {(x, h x)} over the listed h.
SubsetGG graph_subset_gg(const GroupTable& g, const std::vector<int>& translators);

// Independent +-1 entries.
FunctionGG random_pm1_gg(int n, std::uint64_t seed = 42);

// Independent uniform entries in [-1, 1].
FunctionGG random_uniform_gg(int n, std::uint64_t seed = 42);

} // namespace qrg
