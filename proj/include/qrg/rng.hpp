#pragma once

// Deterministic randomness.  All stochastic pieces of the toolkit draw from
// Prng seeded explicitly (default seed 42 everywhere), and any derived stream
// (per restart, per attempt, per task) gets its seed from derive_seed so runs
// are reproducible bit-for-bit regardless of evaluation order or thread count.
//
// std::mt19937_64 is fully specified by the standard; the distributions are
// hand-rolled here because the standard library ones are implementation
// defined.

#include <cmath>
#include <cstdint>
#include <random>

namespace qrg {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x12fad5c9u));
}

class Prng {
public:
    explicit Prng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t u64() { return eng_(); }

    // Uniform in [0,1) with 53 random bits.
    double unit() { return double(u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    int below(int n) { return int(u64() % std::uint64_t(n)); }

    // Random sign, +1 or -1.
    double pm1() { return (u64() & 1ull) ? 1.0 : -1.0; }

    // Standard normal via Box-Muller; caches the second deviate.
    double normal() {
        if (have_spare_) { have_spare_ = false; return spare_; }
        double u = 0.0;
        do { u = unit(); } while (u <= 0.0);
        double v = unit();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qrg
