#pragma once

// Finite groups as explicit multiplication tables.
//
// Built-in families: cyclic(n), dihedral(n) (order 2n), symmetric(m) and
// alternating(m) for m <= 8, sl2(q) and psl2(q) for prime q <= 31, and
// product(a,b).  Tables are validated independently of construction
// (Latin-square property, identity, inverses, associativity), so a bug in a
// builder cannot silently poison downstream arithmetic.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrg/bitset.hpp"
#include "qrg/rational.hpp"

namespace qrg {

struct GroupSpec {
    enum class Family { cyclic, dihedral, symmetric, alternating, sl2, psl2, product };

    Family family = Family::cyclic;
    int param = 0;                  // unused for product
    std::vector<GroupSpec> factors; // exactly two for product

    // Grammar: name "(" int ")" | "product(" spec "," spec ")".
    static GroupSpec parse(std::string_view text);
    std::string str() const;
};

struct GroupTable {
    int n = 0;
    std::vector<int> mul;    // row-major: mul[a*n+b] = a*b
    std::vector<int> inv;
    int id = 0;
    std::vector<std::string> labels;
    std::string family;      // canonical spec string, "" for file-loaded tables

    int op(int a, int b) const { return mul[std::size_t(a) * n + b]; }
};

struct SubsetG {
    int n = 0;
    DynBitset bits;
    int card = 0;

    SubsetG() = default;
    explicit SubsetG(int n_) : n(n_), bits(n_), card(0) {}

    static SubsetG empty(int n) { return SubsetG(n); }
    static SubsetG full(int n) {
        SubsetG s(n);
        s.bits.set_all();
        s.card = n;
        return s;
    }

    bool test(int i) const { return bits.test(i); }
    void add(int i) {
        if (!bits.test(i)) { bits.set(i); ++card; }
    }
    void remove(int i) {
        if (bits.test(i)) { bits.reset(i); --card; }
    }
    void recount() { card = bits.count(); }

    Rational measure() const { return Rational(card, n); }
};

struct ValidationReport {
    bool latin_rows = false;
    bool latin_cols = false;
    bool identity_ok = false;
    bool inverses_ok = false;
    bool associativity_ok = false;
    bool exhaustive = false;          // associativity checked on all n^3 triples
    long long triples_checked = 0;
    std::array<int, 3> counterexample = {-1, -1, -1};
    std::uint64_t seed = 0;

    bool all_pass() const {
        return latin_rows && latin_cols && identity_ok && inverses_ok && associativity_ok;
    }
};

// order_cap guards against runaway table sizes; exceeding it raises
// OrderCapExceeded before any allocation.
GroupTable build_group(const GroupSpec& spec, int order_cap = 5000);
GroupTable build_group(std::string_view spec, int order_cap = 5000);

// Exhaustive associativity for n <= exhaustive_cap, else >= 1e6 seeded triples.
ValidationReport validate_group(const GroupTable& g, std::uint64_t seed = 42,
                                int exhaustive_cap = 512);

// Classes sorted by (size, smallest element); elements ascending inside each.
std::vector<std::vector<int>> conjugacy_classes(const GroupTable& g);

enum class Side { left, right };

// Left translate h*A or right translate A*h.
SubsetG translate_set(const GroupTable& g, const SubsetG& a, int h, Side side);

} // namespace qrg
