#pragma once

// Fixed-size bitset over 64-bit words, the workhorse of corner censuses and
// set algebra on G and G x G rows.

#include <bit>
#include <cstdint>
#include <vector>

namespace qrg {

struct DynBitset {
    int n = 0;
    std::vector<std::uint64_t> w;

    DynBitset() = default;
    explicit DynBitset(int bits) : n(bits), w((bits + 63) / 64, 0ull) {}

    int words() const { return int(w.size()); }

    bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1ull; }
    void set(int i) { w[i >> 6] |= 1ull << (i & 63); }
    void reset(int i) { w[i >> 6] &= ~(1ull << (i & 63)); }
    void clear() { std::fill(w.begin(), w.end(), 0ull); }

    void set_all() {
        std::fill(w.begin(), w.end(), ~0ull);
        trim();
    }

    // Zero the bits above n in the last word.
    void trim() {
        if (n % 64 != 0 && !w.empty())
            w.back() &= (~0ull) >> (64 - n % 64);
    }

    int count() const {
        int c = 0;
        for (std::uint64_t x : w) c += std::popcount(x);
        return c;
    }

    bool any() const {
        for (std::uint64_t x : w) if (x) return true;
        return false;
    }

    bool all() const { return count() == n; }

    void and_with(const DynBitset& o) {
        for (size_t i = 0; i < w.size(); ++i) w[i] &= o.w[i];
    }
    void or_with(const DynBitset& o) {
        for (size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
    }
    void andnot_with(const DynBitset& o) {
        for (size_t i = 0; i < w.size(); ++i) w[i] &= ~o.w[i];
    }

    bool subset_of(const DynBitset& o) const {
        for (size_t i = 0; i < w.size(); ++i)
            if (w[i] & ~o.w[i]) return false;
        return true;
    }

    // Call fn(i) for every set bit, ascending.
    template <class F>
    void for_each(F&& fn) const {
        for (size_t wi = 0; wi < w.size(); ++wi) {
            std::uint64_t x = w[wi];
            while (x) {
                int b = std::countr_zero(x);
                fn(int(wi * 64 + b));
                x &= x - 1;
            }
        }
    }

    friend bool operator==(const DynBitset& a, const DynBitset& b) {
        return a.n == b.n && a.w == b.w;
    }
};

} // namespace qrg
