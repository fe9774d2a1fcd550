#include "qrg/group.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "qrg/errors.hpp"
#include "qrg/rng.hpp"

namespace qrg {

// ---- spec parsing ----

namespace {

struct SpecCursor {
    std::string_view s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    void expect(char c) {
        if (!eat(c))
            fail("ParseError", std::string("expected '") + c + "' at offset " +
                                   std::to_string(pos) + " in group spec");
    }
    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (start == pos)
            fail("ParseError", "expected family name at offset " + std::to_string(start));
        return std::string(s.substr(start, pos - start));
    }
    int integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos)
            fail("ParseError", "expected integer at offset " + std::to_string(start));
        long long v = 0;
        for (size_t i = start; i < pos; ++i) {
            v = v * 10 + (s[i] - '0');
            if (v > 1000000000) fail("ParseError", "integer parameter too large");
        }
        return int(v);
    }
};

GroupSpec parse_spec(SpecCursor& c) {
    std::string name = c.ident();
    GroupSpec spec;
    if (name == "product" || name == "direct_product") {
        spec.family = GroupSpec::Family::product;
        c.expect('(');
        spec.factors.push_back(parse_spec(c));
        c.expect(',');
        spec.factors.push_back(parse_spec(c));
        c.expect(')');
        return spec;
    }
    static const std::map<std::string, GroupSpec::Family> families = {
        {"cyclic", GroupSpec::Family::cyclic},
        {"dihedral", GroupSpec::Family::dihedral},
        {"symmetric", GroupSpec::Family::symmetric},
        {"alternating", GroupSpec::Family::alternating},
        {"sl2", GroupSpec::Family::sl2},
        {"psl2", GroupSpec::Family::psl2},
    };
    auto it = families.find(name);
    if (it == families.end()) fail("UnknownFamily", "no group family named '" + name + "'");
    spec.family = it->second;
    c.expect('(');
    spec.param = c.integer();
    c.expect(')');
    return spec;
}

} // namespace

GroupSpec GroupSpec::parse(std::string_view text) {
    SpecCursor c{text};
    GroupSpec spec = parse_spec(c);
    c.skip_ws();
    if (c.pos != text.size())
        fail("ParseError", "trailing characters in group spec at offset " +
                               std::to_string(c.pos));
    return spec;
}

std::string GroupSpec::str() const {
    switch (family) {
        case Family::cyclic: return "cyclic(" + std::to_string(param) + ")";
        case Family::dihedral: return "dihedral(" + std::to_string(param) + ")";
        case Family::symmetric: return "symmetric(" + std::to_string(param) + ")";
        case Family::alternating: return "alternating(" + std::to_string(param) + ")";
        case Family::sl2: return "sl2(" + std::to_string(param) + ")";
        case Family::psl2: return "psl2(" + std::to_string(param) + ")";
        case Family::product:
            return "product(" + factors[0].str() + "," + factors[1].str() + ")";
    }
    return "";
}

// ---- family builders ----

namespace {

bool is_prime(int q) {
    if (q < 2) return false;
    for (int d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

void check_cap(long long order, int cap) {
    if (order > cap)
        fail("OrderCapExceeded", "group order " + std::to_string(order) +
                                     " exceeds cap " + std::to_string(cap));
}

void finish_inverses(GroupTable& g) {
    g.inv.assign(g.n, -1);
    for (int a = 0; a < g.n; ++a)
        for (int b = 0; b < g.n; ++b)
            if (g.op(a, b) == g.id) { g.inv[a] = b; break; }
    for (int a = 0; a < g.n; ++a)
        if (g.inv[a] < 0) fail("DomainMismatch", "element without inverse in built table");
}

GroupTable build_cyclic(int n, int cap) {
    require(n >= 1, "ParseError", "cyclic(n) needs n >= 1");
    check_cap(n, cap);
    GroupTable g;
    g.n = n;
    g.id = 0;
    g.mul.resize(std::size_t(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) g.mul[std::size_t(a) * n + b] = (a + b) % n;
    g.labels.resize(n);
    for (int a = 0; a < n; ++a) g.labels[a] = std::to_string(a);
    finish_inverses(g);
    return g;
}

// Elements r^i s^j with index i + n*j; (r^i s^j)(r^k s^l) = r^{i+(-1)^j k} s^{j^l}.
GroupTable build_dihedral(int n, int cap) {
    require(n >= 1, "ParseError", "dihedral(n) needs n >= 1");
    check_cap(2ll * n, cap);
    GroupTable g;
    g.n = 2 * n;
    g.id = 0;
    g.mul.resize(std::size_t(g.n) * g.n);
    auto idx = [n](int i, int j) { return i + n * j; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < 2; ++l) {
                    int ii = j == 0 ? (i + k) % n : ((i - k) % n + n) % n;
                    g.mul[std::size_t(idx(i, j)) * g.n + idx(k, l)] = idx(ii, j ^ l);
                }
    g.labels.resize(g.n);
    for (int i = 0; i < n; ++i) {
        g.labels[idx(i, 0)] = "r" + std::to_string(i);
        g.labels[idx(i, 1)] = "r" + std::to_string(i) + "s";
    }
    finish_inverses(g);
    return g;
}

std::string perm_label(const std::vector<int>& p) {
    // Cycle notation over 0..m-1; identity prints as "e".
    int m = int(p.size());
    std::vector<bool> seen(m, false);
    std::string out;
    for (int i = 0; i < m; ++i) {
        if (seen[i] || p[i] == i) { seen[i] = true; continue; }
        out += '(';
        int j = i;
        bool first = true;
        while (!seen[j]) {
            seen[j] = true;
            if (!first) out += ' ';
            out += std::to_string(j);
            first = false;
            j = p[j];
        }
        out += ')';
    }
    return out.empty() ? "e" : out;
}

GroupTable build_permutations(int m, bool even_only, int cap) {
    require(m >= 1 && m <= 8, "ParseError", "symmetric/alternating degree must be in [1,8]");
    std::vector<std::vector<int>> perms;
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 0);
    do {
        if (even_only) {
            int inversions = 0;
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j)
                    if (p[i] > p[j]) ++inversions;
            if (inversions % 2 != 0) continue;
        }
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    check_cap(static_cast<long long>(perms.size()), cap);

    std::map<std::vector<int>, int> index;
    for (int i = 0; i < int(perms.size()); ++i) index[perms[i]] = i;

    GroupTable g;
    g.n = int(perms.size());
    g.mul.resize(std::size_t(g.n) * g.n);
    std::vector<int> comp(m);
    for (int a = 0; a < g.n; ++a)
        for (int b = 0; b < g.n; ++b) {
            for (int i = 0; i < m; ++i) comp[i] = perms[a][perms[b][i]];
            g.mul[std::size_t(a) * g.n + b] = index.at(comp);
        }
    std::vector<int> ident(m);
    std::iota(ident.begin(), ident.end(), 0);
    g.id = index.at(ident);
    g.labels.resize(g.n);
    for (int a = 0; a < g.n; ++a) g.labels[a] = perm_label(perms[a]);
    finish_inverses(g);
    return g;
}

struct Mat2 {
    int a, b, c, d;
    friend bool operator<(const Mat2& x, const Mat2& y) {
        return std::tie(x.a, x.b, x.c, x.d) < std::tie(y.a, y.b, y.c, y.d);
    }
    friend bool operator==(const Mat2& x, const Mat2& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }
};

std::string mat_label(const Mat2& m) {
    return "[[" + std::to_string(m.a) + "," + std::to_string(m.b) + "],[" +
           std::to_string(m.c) + "," + std::to_string(m.d) + "]]";
}

GroupTable build_sl2_like(int q, bool projective, int cap) {
    require(is_prime(q) && q <= 31, "NonPrimeParameter",
            "sl2/psl2 parameter must be a prime <= 31");
    if (projective)
        require(q % 2 == 1, "NonPrimeParameter", "psl2 parameter must be an odd prime");

    auto canonical = [&](Mat2 m) {
        if (!projective) return m;
        // A projective element is {M, -M}; keep the representative whose first
        // nonzero entry (scanning a,b,c,d) lies in [1, (q-1)/2].
        Mat2 neg{(q - m.a) % q, (q - m.b) % q, (q - m.c) % q, (q - m.d) % q};
        std::array<int, 4> e1{m.a, m.b, m.c, m.d}, e2{neg.a, neg.b, neg.c, neg.d};
        for (int i = 0; i < 4; ++i) {
            if (e1[i] == 0 && e2[i] == 0) continue;
            return e1[i] != 0 && e1[i] <= (q - 1) / 2 ? m : neg;
        }
        return m;
    };

    std::vector<Mat2> elems;
    std::map<Mat2, int> index;
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
            for (int c = 0; c < q; ++c)
                for (int d = 0; d < q; ++d) {
                    if (((a * d - b * c) % q + q) % q != 1 % q) continue;
                    Mat2 m = canonical(Mat2{a, b, c, d});
                    if (index.count(m)) continue;
                    index[m] = int(elems.size());
                    elems.push_back(m);
                }
    check_cap(static_cast<long long>(elems.size()), cap);

    GroupTable g;
    g.n = int(elems.size());
    g.mul.resize(std::size_t(g.n) * g.n);
    for (int x = 0; x < g.n; ++x)
        for (int y = 0; y < g.n; ++y) {
            const Mat2& u = elems[x];
            const Mat2& v = elems[y];
            Mat2 w{(u.a * v.a + u.b * v.c) % q, (u.a * v.b + u.b * v.d) % q,
                   (u.c * v.a + u.d * v.c) % q, (u.c * v.b + u.d * v.d) % q};
            g.mul[std::size_t(x) * g.n + y] = index.at(canonical(w));
        }
    g.id = index.at(canonical(Mat2{1 % q, 0, 0, 1 % q}));
    g.labels.resize(g.n);
    for (int x = 0; x < g.n; ++x) g.labels[x] = mat_label(elems[x]);
    finish_inverses(g);
    return g;
}

GroupTable build_product(const GroupSpec& spec, int cap) {
    // Build factors with the full cap, then check the product order.
    GroupTable a = build_group(spec.factors[0], cap);
    GroupTable b = build_group(spec.factors[1], cap);
    check_cap(1ll * a.n * b.n, cap);
    GroupTable g;
    g.n = a.n * b.n;
    g.mul.resize(std::size_t(g.n) * g.n);
    auto idx = [&](int x, int y) { return x * b.n + y; };
    for (int xa = 0; xa < a.n; ++xa)
        for (int xb = 0; xb < b.n; ++xb)
            for (int ya = 0; ya < a.n; ++ya)
                for (int yb = 0; yb < b.n; ++yb)
                    g.mul[std::size_t(idx(xa, xb)) * g.n + idx(ya, yb)] =
                        idx(a.op(xa, ya), b.op(xb, yb));
    g.id = idx(a.id, b.id);
    g.labels.resize(g.n);
    for (int xa = 0; xa < a.n; ++xa)
        for (int xb = 0; xb < b.n; ++xb)
            g.labels[idx(xa, xb)] = "(" + a.labels[xa] + "|" + b.labels[xb] + ")";
    finish_inverses(g);
    return g;
}

} // namespace

GroupTable build_group(const GroupSpec& spec, int order_cap) {
    GroupTable g;
    switch (spec.family) {
        case GroupSpec::Family::cyclic: g = build_cyclic(spec.param, order_cap); break;
        case GroupSpec::Family::dihedral: g = build_dihedral(spec.param, order_cap); break;
        case GroupSpec::Family::symmetric:
            g = build_permutations(spec.param, false, order_cap);
            break;
        case GroupSpec::Family::alternating:
            g = build_permutations(spec.param, true, order_cap);
            break;
        case GroupSpec::Family::sl2: g = build_sl2_like(spec.param, false, order_cap); break;
        case GroupSpec::Family::psl2: g = build_sl2_like(spec.param, true, order_cap); break;
        case GroupSpec::Family::product: g = build_product(spec, order_cap); break;
    }
    g.family = spec.str();
    return g;
}

GroupTable build_group(std::string_view spec, int order_cap) {
    return build_group(GroupSpec::parse(spec), order_cap);
}

// ---- validation ----

ValidationReport validate_group(const GroupTable& g, std::uint64_t seed, int exhaustive_cap) {
    ValidationReport r;
    r.seed = seed;
    int n = g.n;
    require(n >= 1 && int(g.mul.size()) == n * n && int(g.inv.size()) == n,
            "DomainMismatch", "malformed group table");

    // Latin square: every row and column is a permutation of the elements.
    std::vector<char> seen(n);
    r.latin_rows = true;
    for (int a = 0; a < n && r.latin_rows; ++a) {
        std::fill(seen.begin(), seen.end(), 0);
        for (int b = 0; b < n; ++b) {
            int v = g.op(a, b);
            if (v < 0 || v >= n || seen[v]) { r.latin_rows = false; break; }
            seen[v] = 1;
        }
    }
    r.latin_cols = true;
    for (int b = 0; b < n && r.latin_cols; ++b) {
        std::fill(seen.begin(), seen.end(), 0);
        for (int a = 0; a < n; ++a) {
            int v = g.op(a, b);
            if (v < 0 || v >= n || seen[v]) { r.latin_cols = false; break; }
            seen[v] = 1;
        }
    }

    r.identity_ok = g.id >= 0 && g.id < n;
    for (int a = 0; a < n && r.identity_ok; ++a)
        if (g.op(g.id, a) != a || g.op(a, g.id) != a) r.identity_ok = false;

    r.inverses_ok = true;
    for (int a = 0; a < n && r.inverses_ok; ++a) {
        int b = g.inv[a];
        if (b < 0 || b >= n || g.op(a, b) != g.id || g.op(b, a) != g.id)
            r.inverses_ok = false;
    }

    r.associativity_ok = true;
    if (n <= exhaustive_cap) {
        r.exhaustive = true;
        for (int a = 0; a < n && r.associativity_ok; ++a)
            for (int b = 0; b < n && r.associativity_ok; ++b)
                for (int c = 0; c < n; ++c) {
                    ++r.triples_checked;
                    if (g.op(g.op(a, b), c) != g.op(a, g.op(b, c))) {
                        r.associativity_ok = false;
                        r.counterexample = {a, b, c};
                        break;
                    }
                }
    } else {
        r.exhaustive = false;
        Prng rng(seed);
        const long long samples = 1000000;
        for (long long i = 0; i < samples; ++i) {
            int a = rng.below(n), b = rng.below(n), c = rng.below(n);
            ++r.triples_checked;
            if (g.op(g.op(a, b), c) != g.op(a, g.op(b, c))) {
                r.associativity_ok = false;
                r.counterexample = {a, b, c};
                break;
            }
        }
    }
    return r;
}

std::vector<std::vector<int>> conjugacy_classes(const GroupTable& g) {
    int n = g.n;
    std::vector<int> cls(n, -1);
    std::vector<std::vector<int>> classes;
    for (int x = 0; x < n; ++x) {
        if (cls[x] >= 0) continue;
        std::vector<int> orbit;
        int c = int(classes.size());
        for (int a = 0; a < n; ++a) {
            int y = g.op(g.op(a, x), g.inv[a]);
            if (cls[y] < 0) { cls[y] = c; orbit.push_back(y); }
        }
        std::sort(orbit.begin(), orbit.end());
        classes.push_back(std::move(orbit));
    }
    std::sort(classes.begin(), classes.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.front() < b.front();
    });
    return classes;
}

SubsetG translate_set(const GroupTable& g, const SubsetG& a, int h, Side side) {
    require(a.n == g.n, "DomainMismatch", "subset does not match group order");
    require(h >= 0 && h < g.n, "IndexOutOfRange", "translator out of range");
    SubsetG out(g.n);
    a.bits.for_each([&](int x) {
        out.bits.set(side == Side::left ? g.op(h, x) : g.op(x, h));
    });
    out.card = a.card;
    return out;
}

} // namespace qrg
