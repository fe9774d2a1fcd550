#pragma once

// Exact rational bookkeeping for set measures and normalized counts.
//
// Every measure in this toolkit is a ratio of integers (|A|/n, count/n^2), so
// Rational keeps them exact.  ratio_ge() compares such a ratio against an
// arbitrary double threshold with no rounding at all: the double is decomposed
// into m * 2^e and the comparison is done in 128-bit integer arithmetic.  This
// is what makes threshold sets reproducible down to the last tied element.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "qrg/errors.hpp"

namespace qrg {

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) {
        require(d > 0, "DomainMismatch", "rational denominator must be positive");
        reduce();
    }

    void reduce() {
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    double to_double() const { return double(num) / double(den); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }

    std::string str() const {
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

// Exact comparison num/den >= t for num >= 0, 0 < den <= 2^50, t any double.
// NaN compares false.
inline bool ratio_ge(long long num, long long den, double t) {
    require(num >= 0 && den > 0 && den <= (1ll << 50), "DomainMismatch",
            "ratio_ge expects 0 <= num, 0 < den <= 2^50");
    if (std::isnan(t)) return false;
    if (t <= 0.0) {
        if (t == 0.0) return true; // num >= 0
        if (std::isinf(t)) return true;
        // t < 0 < num/den or t < 0 == num/den.
        return true;
    }
    if (std::isinf(t)) return false;
    // t = m * 2^e exactly, with 0 < m <= 2^53.
    int e2 = 0;
    double frac = std::frexp(t, &e2); // t = frac * 2^e2, frac in [0.5, 1)
    long long m = llround(std::ldexp(frac, 53));
    int e = e2 - 53;
    // Compare num * 2^{-e} >= m * den     when e < 0
    //         num          >= m * den * 2^{e}  when e >= 0
    using u128 = unsigned __int128;
    u128 lhs = static_cast<u128>(num);
    u128 rhs = static_cast<u128>(m) * static_cast<u128>(den); // <= 2^103
    if (e >= 0) {
        if (e > 24) return false; // rhs >= 2^{e} > 2^24 * ... exceeds any lhs < 2^63
        rhs <<= e;                 // <= 2^127
        return lhs >= rhs;
    }
    int s = -e;
    // lhs * 2^s vs rhs (<= 2^103): once lhs has any bit and s pushes it past
    // 2^104 the answer is settled.
    if (num == 0) return false; // 0 >= positive rhs is false
    int nb = std::bit_width(static_cast<unsigned long long>(num));
    if (nb + s > 110) return true;
    lhs <<= s;
    return lhs >= rhs;
}

inline bool ratio_gt(long long num, long long den, double t) {
    // num/den > t  <=>  !(t >= num/den)  <=>  num/den >= t and not equal;
    // easier: num/den > t  <=>  !(num/den <= t)  <=>  !(−num/den >= −t) with
    // sign juggling.  Implement directly: > t iff >= t and (not == t).
    if (!ratio_ge(num, den, t)) return false;
    // Equality test: t == num/den exactly iff t*den == num with t dyadic.
    double q = double(num) / double(den);
    if (q != t) return true; // if they differ even after rounding, strict
    // q == t as doubles; decide exactly: t == num/den iff ratio_ge both ways.
    // num/den <= t  <=>  t >= num/den  <=>  ratio_le:
    int e2 = 0;
    double frac = std::frexp(t, &e2);
    long long m = llround(std::ldexp(frac, 53));
    int e = e2 - 53;
    using u128 = unsigned __int128;
    // t == num/den  <=>  m * den * 2^e == num
    u128 md = static_cast<u128>(m) * static_cast<u128>(den);
    if (e >= 0) {
        if (e > 24) return true; // t huge, cannot equal; but ratio_ge held so >
        return static_cast<u128>(num) != (md << e);
    }
    int s = -e;
    if (num == 0) return false;
    int nb = std::bit_width(static_cast<unsigned long long>(num));
    if (nb + s > 110) return true;
    return (static_cast<u128>(num) << s) != md;
}

} // namespace qrg
