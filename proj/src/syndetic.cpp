// Anti-neighbourhoods, covering certificates, and the staged syndeticity run.
//
// Correlations <u, pi^g v> per action, all exact and O(n^3) total:
//   regular: avg_x u(x) v(gx)
//   S:   avg_x R(x, gx)   with R(x,x') = avg_y u(x,y) v(x',y)
//   T:   avg_y C(y, gy)   with C(y,y') = avg_x u(x,y) v(x,y')
//   ST:  avg_z avg_x U_z(x) V_z(gx)   with U_z(x) = u(x, xz)
// and <Pu, Pv> from the matching marginal means (constants / functions of y /
// of x / of x^{-1}y).  Membership in A(pi,u,v,eps) is the strict comparison
// deviation < eps - 1e-12, so ties resolve identically everywhere.
//
// Cover search over left translates h*B: greedy takes the translate with the
// largest new coverage (ties to the smallest element index); exact runs
// iterative deepening depth-first search over increasing translator indices,
// pruning branches with ceil(uncovered/|B|) > remaining slots.

#include "qrg/syndetic.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "qrg/errors.hpp"
#include "qrg/parallel.hpp"
#include "qrg/rng.hpp"

namespace qrg {

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return std::string(buf);
}

void check_action_domains(const GroupTable& g, ActionKind a, const RepVector& u,
                          const RepVector& v) {
    RepVector::Domain want =
        a == ActionKind::regular ? RepVector::Domain::G : RepVector::Domain::GG;
    require(u.domain == want && v.domain == want, "DomainMismatch",
            std::string("action ") + action_name(a) + " needs vectors on " +
                (want == RepVector::Domain::G ? "G" : "G x G"));
    require(u.n == g.n && v.n == g.n, "DomainMismatch",
            "vector order does not match the group");
    std::size_t want_dim = want == RepVector::Domain::G ? std::size_t(g.n)
                                                        : std::size_t(g.n) * g.n;
    require(u.dim() == want_dim && v.dim() == want_dim, "DomainMismatch",
            "vector length does not match its domain");
}

struct ActionCorr {
    std::vector<double> ip; // <u, pi^g v> per g
    double proj = 0.0;      // <Pu, Pv>
};

ActionCorr action_correlations(const GroupTable& g, ActionKind a, const RepVector& u,
                               const RepVector& v) {
    const int n = g.n;
    const int* mul = g.mul.data();
    ActionCorr r;
    r.ip.assign(std::size_t(n), 0.0);

    if (a == ActionKind::regular) {
        parallel_for(n, [&](std::int64_t gi) {
            const int* grow = mul + gi * n;
            double s = 0.0;
            for (int x = 0; x < n; ++x) s += u.v[x] * v.v[grow[x]];
            r.ip[gi] = s / n;
        });
        r.proj = u.mean() * v.mean();
        return r;
    }

    if (a == ActionKind::S) {
        // R(x,x') = avg_y u(x,y) v(x',y)
        std::vector<double> R(std::size_t(n) * n, 0.0);
        parallel_for(n, [&](std::int64_t x) {
            const double* ur = u.v.data() + x * n;
            for (int xp = 0; xp < n; ++xp) {
                const double* vr = v.v.data() + std::size_t(xp) * n;
                double s = 0.0;
                for (int y = 0; y < n; ++y) s += ur[y] * vr[y];
                R[x * n + xp] = s / n;
            }
        });
        parallel_for(n, [&](std::int64_t gi) {
            const int* grow = mul + gi * n;
            double s = 0.0;
            for (int x = 0; x < n; ++x) s += R[std::size_t(x) * n + grow[x]];
            r.ip[gi] = s / n;
        });
        // P projects onto functions of y: column means over x.
        double s = 0.0;
        for (int y = 0; y < n; ++y) {
            double mu = 0.0, mv = 0.0;
            for (int x = 0; x < n; ++x) {
                mu += u.v[std::size_t(x) * n + y];
                mv += v.v[std::size_t(x) * n + y];
            }
            s += (mu / n) * (mv / n);
        }
        r.proj = s / n;
        return r;
    }

    if (a == ActionKind::T) {
        // C(y,y') = avg_x u(x,y) v(x,y')
        std::vector<double> C(std::size_t(n) * n, 0.0);
        parallel_for(n, [&](std::int64_t y) {
            for (int yp = 0; yp < n; ++yp) {
                double s = 0.0;
                for (int x = 0; x < n; ++x)
                    s += u.v[std::size_t(x) * n + y] * v.v[std::size_t(x) * n + yp];
                C[y * n + yp] = s / n;
            }
        });
        parallel_for(n, [&](std::int64_t gi) {
            const int* grow = mul + gi * n;
            double s = 0.0;
            for (int y = 0; y < n; ++y) s += C[std::size_t(y) * n + grow[y]];
            r.ip[gi] = s / n;
        });
        // P projects onto functions of x: row means over y.
        double s = 0.0;
        for (int x = 0; x < n; ++x) {
            double mu = 0.0, mv = 0.0;
            const double* ur = u.v.data() + std::size_t(x) * n;
            const double* vr = v.v.data() + std::size_t(x) * n;
            for (int y = 0; y < n; ++y) {
                mu += ur[y];
                mv += vr[y];
            }
            s += (mu / n) * (mv / n);
        }
        r.proj = s / n;
        return r;
    }

    // ST.  Slice along the cosets y = xz: U(z,x) = u(x, xz).
    std::vector<double> U(std::size_t(n) * n, 0.0), V(std::size_t(n) * n, 0.0);
    parallel_for(n, [&](std::int64_t z) {
        for (int x = 0; x < n; ++x) {
            int y = mul[std::size_t(x) * n + z];
            U[z * n + x] = u.v[std::size_t(x) * n + y];
            V[z * n + x] = v.v[std::size_t(x) * n + y];
        }
    });
    parallel_for(n, [&](std::int64_t gi) {
        const int* grow = mul + gi * n;
        double s = 0.0;
        for (int z = 0; z < n; ++z) {
            const double* uz = U.data() + std::size_t(z) * n;
            const double* vz = V.data() + std::size_t(z) * n;
            double t = 0.0;
            for (int x = 0; x < n; ++x) t += uz[x] * vz[grow[x]];
            s += t;
        }
        r.ip[gi] = s / (double(n) * n);
    });
    // P projects onto functions of x^{-1}y: means along each slice.
    double s = 0.0;
    for (int z = 0; z < n; ++z) {
        double mu = 0.0, mv = 0.0;
        const double* uz = U.data() + std::size_t(z) * n;
        const double* vz = V.data() + std::size_t(z) * n;
        for (int x = 0; x < n; ++x) {
            mu += uz[x];
            mv += vz[x];
        }
        s += (mu / n) * (mv / n);
    }
    r.proj = s / n;
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// Anti-neighbourhoods
// ---------------------------------------------------------------------------

AntiNbhd anti_neighbourhood(const GroupTable& g, const AntiNbhdSpec& spec, long long D) {
    check_action_domains(g, spec.action, spec.u, spec.v);
    require(D >= 1, "DomainMismatch", "degree must be at least 1");
    const int n = g.n;

    ActionCorr corr = action_correlations(g, spec.action, spec.u, spec.v);

    AntiNbhd r;
    r.projection_term = corr.proj;
    r.set = SubsetG(n);
    r.deviations.assign(std::size_t(n), 0.0);
    for (int gi = 0; gi < n; ++gi) {
        double dev = std::abs(corr.ip[gi] - corr.proj);
        r.deviations[gi] = dev;
        if (dev < spec.eps - 1e-12) r.set.add(gi);
    }

    bool unit = std::abs(spec.u.norm() - 1.0) <= 1e-9 && std::abs(spec.v.norm() - 1.0) <= 1e-9;
    BoundCheck c;
    c.name = "anti-neighbourhood-measure";
    c.kind = "lower";
    c.observed = r.set.measure().to_double();
    c.add_param("action", action_name(spec.action));
    c.add_param("eps", spec.eps);
    c.add_param("D", double(D));
    c.add_param("unit_vectors", unit ? "true" : "false");
    if (unit && spec.eps > 0.0) {
        c.bound = std::max(0.0, 1.0 - 1.0 / (double(D) * spec.eps * spec.eps));
        c.vacuous = c.bound <= 0.0;
    } else {
        // The measure guarantee is stated for unit vectors only.
        c.bound = 0.0;
        c.vacuous = true;
        c.observational = true;
    }
    c.finish();
    r.measure_check = c;
    return r;
}

AntiNbhd anti_neighbourhood(const GroupTable& g, const AntiNbhdSpec& spec) {
    return anti_neighbourhood(g, spec, quasirandomness_degree(g));
}

// ---------------------------------------------------------------------------
// Almost-orthogonality
// ---------------------------------------------------------------------------

BoundCheck almost_orthogonal_bound(const RepVector& v, const std::vector<RepVector>& u_list) {
    const std::size_t m = u_list.size();
    for (std::size_t i = 0; i < m; ++i)
        require(u_list[i].domain == v.domain && u_list[i].n == v.n &&
                    u_list[i].dim() == v.dim(),
                "DomainMismatch", "family vectors must live on the same space as v");
    require(std::abs(v.norm() - 1.0) <= 1e-9, "NotUnit", "v must be a unit vector");
    for (std::size_t i = 0; i < m; ++i)
        require(std::abs(u_list[i].norm() - 1.0) <= 1e-9, "NotUnit",
                "family vector " + std::to_string(i) + " must be a unit vector");

    double pair_cap = m > 0 ? 1.0 / (double(m) * double(m)) : 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            require(std::abs(inner(u_list[i], u_list[j])) <= pair_cap + 1e-12,
                    "PairwiseConditionViolated",
                    fmt("|<u_%zu, u_%zu>| exceeds 1/m^2 = %.6g", i, j, pair_cap));

    double s = 0.0;
    for (const RepVector& u : u_list) {
        double t = inner(v, u);
        s += t * t;
    }
    BoundCheck c;
    c.name = "almost-orthogonal-energy";
    c.observed = s;
    c.bound = 2.0;
    c.add_param("m", double(m));
    c.finish();
    return c;
}

int select_near_orthogonal_index(const std::vector<RepVector>& v_list,
                                 const std::vector<std::vector<RepVector>>& u_lists) {
    const std::size_t k = v_list.size();
    require(k >= 1, "DomainMismatch", "need at least one selector vector");
    require(u_lists.size() == k, "DomainMismatch", "need one family per selector vector");
    const std::size_t m = u_lists[0].size();
    require(m >= 1, "DomainMismatch", "families must be nonempty");
    for (std::size_t l = 0; l < k; ++l)
        require(u_lists[l].size() == m, "DomainMismatch", "families must share one size");

    // Same preconditions as the energy bound, family by family.
    for (std::size_t l = 0; l < k; ++l) (void)almost_orthogonal_bound(v_list[l], u_lists[l]);

    const double thr = std::sqrt(2.0 * double(k) / double(m)) + 1e-12;
    for (std::size_t i = 0; i < m; ++i) {
        bool ok = true;
        for (std::size_t l = 0; l < k && ok; ++l)
            ok = std::abs(inner(v_list[l], u_lists[l][i])) <= thr;
        if (ok) return int(i);
    }
    fail("NotFound", "no index is near-orthogonal to every selector vector");
}

// ---------------------------------------------------------------------------
// Syndeticity certificates
// ---------------------------------------------------------------------------

namespace {

bool cover_dfs(int n, const std::vector<DynBitset>& translates, int base_card,
               const DynBitset& covered, int covered_count, int start, long long slots,
               std::vector<int>& chosen) {
    if (covered_count == n) return true;
    if (slots <= 0) return false;
    long long uncovered = n - covered_count;
    if ((uncovered + base_card - 1) / base_card > slots) return false;
    for (int h = start; h < n; ++h) {
        DynBitset next = covered;
        next.or_with(translates[h]);
        int c2 = next.count();
        if (c2 == covered_count) continue; // adds nothing here, never helps
        chosen.push_back(h);
        if (cover_dfs(n, translates, base_card, next, c2, h + 1, slots - 1, chosen))
            return true;
        chosen.pop_back();
    }
    return false;
}

} // namespace

SyndeticityCertificate syndetic_cover(const GroupTable& g, const SubsetG& B,
                                      CoverMode mode, long long max_K) {
    require(B.n == g.n, "DomainMismatch", "base set order does not match the group");
    require(B.card > 0, "EmptySet", "covering needs a nonempty base set");
    require(max_K >= 1, "DomainMismatch", "max_K must be at least 1");
    const int n = g.n;

    std::vector<DynBitset> translates;
    translates.reserve(std::size_t(n));
    for (int h = 0; h < n; ++h)
        translates.push_back(translate_set(g, B, h, Side::left).bits);

    SyndeticityCertificate cert;
    cert.method = mode;
    cert.lower_bound = (n + B.card - 1) / B.card;

    if (mode == CoverMode::greedy) {
        DynBitset covered(n);
        int covered_count = 0;
        while (covered_count < n && (long long)cert.translators.size() < max_K) {
            int best = -1;
            int best_gain = -1;
            for (int h = 0; h < n; ++h) {
                DynBitset fresh = translates[h];
                fresh.andnot_with(covered);
                int gain = fresh.count();
                if (gain > best_gain) {
                    best_gain = gain;
                    best = h;
                }
            }
            if (best_gain <= 0) break;
            cert.translators.push_back(best);
            covered.or_with(translates[best]);
            covered_count = covered.count();
        }
        cert.K = (long long)cert.translators.size();
        cert.coverage = covered_count == n;
        return cert;
    }

    for (long long K = cert.lower_bound; K <= max_K; ++K) {
        std::vector<int> chosen;
        if (cover_dfs(n, translates, B.card, DynBitset(n), 0, 0, K, chosen)) {
            cert.translators = chosen;
            cert.K = K;
            cert.coverage = true;
            return cert;
        }
    }
    cert.K = 0;
    cert.coverage = false;
    return cert;
}

bool certificate_valid(const GroupTable& g, const SubsetG& B,
                       const SyndeticityCertificate& cert) {
    if (B.n != g.n || B.card <= 0) return false;
    if (cert.K != (long long)cert.translators.size()) return false;
    if (cert.lower_bound != (g.n + B.card - 1) / B.card) return false;
    for (int h : cert.translators)
        if (h < 0 || h >= g.n) return false;
    DynBitset u(g.n);
    for (int h : cert.translators) u.or_with(translate_set(g, B, h, Side::left).bits);
    bool covers = u.count() == g.n;
    if (covers != cert.coverage) return false;
    if (cert.coverage && cert.K < cert.lower_bound) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Randomized witness for covering an anti-neighbourhood intersection
// ---------------------------------------------------------------------------

BasicSyndeticWitness basic_syndetic_witness(const GroupTable& g,
                                            const std::vector<AntiNbhdSpec>& specs,
                                            long long K, long long D, std::uint64_t seed,
                                            int max_attempts) {
    require(!specs.empty(), "DomainMismatch", "need at least one spec");
    require(K >= 1, "DomainMismatch", "K must be at least 1");
    require(D >= 1, "DomainMismatch", "degree must be at least 1");
    require(max_attempts >= 1, "DomainMismatch", "max_attempts must be at least 1");
    const double eta = specs[0].eps;
    for (const AntiNbhdSpec& s : specs)
        require(s.eps == eta, "DomainMismatch", "specs must share one tolerance");
    const int n = g.n;
    const std::size_t k = specs.size();

    BasicSyndeticWitness w;
    w.K = K;
    w.eta = eta;
    w.D = D;
    w.seed = seed;
    w.formula_K = std::ceil(2.0 * double(k) / (eta * eta) + 1.0);
    w.d_required = std::pow(double(K), 6.0) * double(k) + 1.0;
    w.hypothesis_met = double(K) >= w.formula_K && double(D) >= w.d_required;
    if (double(K) < w.formula_K)
        w.notes.push_back(fmt("K = %lld is below the formula value %.0f", K, w.formula_K));
    if (double(D) < w.d_required)
        w.notes.push_back(
            fmt("degree %lld is below the required %.6g; coverage is reported, not guaranteed",
                D, w.d_required));

    // Intersection to be covered, at the specs' own tolerance.
    w.A = SubsetG::full(n);
    for (const AntiNbhdSpec& s : specs) {
        AntiNbhd a = anti_neighbourhood(g, s, D);
        w.A.bits.and_with(a.set.bits);
    }
    w.A.recount();

    // Pair condition at tolerance 1/K^2, phrased through the u-against-u
    // anti-neighbourhoods: <pi^{h_i} u, pi^{h_j} u> - <Pu, Pu> is the
    // deviation at h_j h_i^{-1}.
    const double pair_eps = 1.0 / (double(K) * double(K));
    std::vector<SubsetG> pair_ok;
    pair_ok.reserve(k);
    for (const AntiNbhdSpec& s : specs) {
        AntiNbhdSpec ps;
        ps.action = s.action;
        ps.u = s.u;
        ps.v = s.u;
        ps.eps = pair_eps;
        pair_ok.push_back(anti_neighbourhood(g, ps, D).set);
    }

    const int* mul = g.mul.data();
    const int* inv = g.inv.data();
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        Prng rng(derive_seed(seed, std::uint64_t(attempt)));
        std::vector<int> h(std::size_t(K), 0);
        for (int i = 0; i < K; ++i) h[std::size_t(i)] = rng.below(n);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < h.size() && ok; ++i)
            for (std::size_t j = i + 1; j < h.size() && ok; ++j) {
                int d = mul[std::size_t(h[j]) * n + inv[h[i]]];
                for (std::size_t l = 0; l < k && ok; ++l) ok = pair_ok[l].test(d);
            }
        w.attempts = attempt;
        if (ok) {
            w.found = true;
            w.h = h;
            break;
        }
    }
    if (!w.found) {
        w.notes.push_back(
            fmt("no witness tuple found within %d attempts", max_attempts));
        return w;
    }

    // Coverage by left translates: every g must have some h_i^{-1} g in A.
    bool cover = true;
    for (int gi = 0; gi < n && cover; ++gi) {
        bool hit = false;
        for (int x : w.h)
            if (w.A.test(mul[std::size_t(inv[x]) * n + gi])) {
                hit = true;
                break;
            }
        cover = hit;
    }
    w.coverage = cover;
    return w;
}

BasicSyndeticWitness basic_syndetic_witness(const GroupTable& g,
                                            const std::vector<AntiNbhdSpec>& specs,
                                            long long K, std::uint64_t seed,
                                            int max_attempts) {
    return basic_syndetic_witness(g, specs, K, quasirandomness_degree(g), seed,
                                  max_attempts);
}

// ---------------------------------------------------------------------------
// Witness tuple taming the random parts of two triples
// ---------------------------------------------------------------------------

namespace {

void check_bounded_gg(const GroupTable& g, const FunctionGG& f, const char* which) {
    require(f.n == g.n && f.v.size() == std::size_t(g.n) * g.n, "DomainMismatch",
            std::string(which) + " is not a function on this G x G");
    for (double x : f.v)
        require(std::abs(x) <= 1.0 + 1e-12, "RangeViolation",
                std::string(which) + " must take values in [-1,1]");
}

// out[d] = avg_x ( avg_y f(x,y) f(dx,y) )^2
std::vector<double> pair_condexp_sq_s(const GroupTable& g, const FunctionGG& f) {
    const int n = g.n;
    const int* mul = g.mul.data();
    std::vector<double> out(std::size_t(n), 0.0);
    parallel_for(n, [&](std::int64_t d) {
        const int* drow = mul + d * n;
        double s = 0.0;
        for (int x = 0; x < n; ++x) {
            const double* fx = f.v.data() + std::size_t(x) * n;
            const double* fdx = f.v.data() + std::size_t(drow[x]) * n;
            double t = 0.0;
            for (int y = 0; y < n; ++y) t += fx[y] * fdx[y];
            t /= n;
            s += t * t;
        }
        out[d] = s / n;
    });
    return out;
}

// out[d] = avg_x ( avg_y f(x,y) f(dx,dy) )^2
std::vector<double> pair_condexp_sq_st(const GroupTable& g, const FunctionGG& f) {
    const int n = g.n;
    const int* mul = g.mul.data();
    std::vector<double> out(std::size_t(n), 0.0);
    parallel_for(n, [&](std::int64_t d) {
        const int* drow = mul + d * n;
        double s = 0.0;
        for (int x = 0; x < n; ++x) {
            const double* fx = f.v.data() + std::size_t(x) * n;
            const double* fdx = f.v.data() + std::size_t(drow[x]) * n;
            double t = 0.0;
            for (int y = 0; y < n; ++y) t += fx[y] * fdx[drow[y]];
            t /= n;
            s += t * t;
        }
        out[d] = s / n;
    });
    return out;
}

FunctionGG shifted_product_s(const GroupTable& g, const FunctionGG& f, int hi, int hj) {
    const int n = g.n;
    const int* mul = g.mul.data();
    FunctionGG out(n, 0.0, -1.0, 1.0);
    for (int x = 0; x < n; ++x) {
        int xi = mul[std::size_t(hi) * n + x];
        int xj = mul[std::size_t(hj) * n + x];
        const double* fi = f.v.data() + std::size_t(xi) * n;
        const double* fj = f.v.data() + std::size_t(xj) * n;
        double* o = out.v.data() + std::size_t(x) * n;
        for (int y = 0; y < n; ++y) o[y] = fi[y] * fj[y];
    }
    return out;
}

FunctionGG shifted_product_st(const GroupTable& g, const FunctionGG& f, int hi, int hj) {
    const int n = g.n;
    const int* mul = g.mul.data();
    FunctionGG out(n, 0.0, -1.0, 1.0);
    const int* ri = mul + std::size_t(hi) * n;
    const int* rj = mul + std::size_t(hj) * n;
    for (int x = 0; x < n; ++x) {
        const double* fi = f.v.data() + std::size_t(ri[x]) * n;
        const double* fj = f.v.data() + std::size_t(rj[x]) * n;
        double* o = out.v.data() + std::size_t(x) * n;
        for (int y = 0; y < n; ++y) o[y] = fi[ri[y]] * fj[rj[y]];
    }
    return out;
}

} // namespace

PipelineWitness kill_random_f2_pipeline(const GroupTable& g, const FunctionGG& f2_1,
                                        const FunctionGG& f2_2, const FunctionGG& f2_3,
                                        const FunctionGG& f3_1, const FunctionGG& f3_2,
                                        const FunctionGG& f3_3, double eps, long long D,
                                        const PipelineCaps& caps, std::uint64_t seed) {
    check_bounded_gg(g, f2_1, "first function of the first triple");
    check_bounded_gg(g, f2_2, "second function of the first triple");
    check_bounded_gg(g, f2_3, "third function of the first triple");
    check_bounded_gg(g, f3_1, "first function of the second triple");
    check_bounded_gg(g, f3_2, "second function of the second triple");
    check_bounded_gg(g, f3_3, "third function of the second triple");
    require(eps > 0.0, "DomainMismatch", "eps must be positive");
    require(D >= 1, "DomainMismatch", "degree must be at least 1");
    const int n = g.n;

    PipelineWitness w;
    w.eps = eps;
    w.D = D;
    w.seed = seed;

    double k_formula = std::ceil(4.0 / (eps * eps));
    long long k = 1;
    if (k_formula > double(caps.k_cap)) {
        k = caps.k_cap;
        w.notes.push_back(
            fmt("witness size capped at %lld (formula wants %.0f)", k, k_formula));
    } else if (k_formula > 1.0) {
        k = (long long)k_formula;
    }
    w.k = k;

    double eta = std::pow(3.0 * double(k), -8.0);
    if (eta < caps.eta_floor) {
        w.notes.push_back(
            fmt("tolerance floored at %g (formula wants %g)", caps.eta_floor, eta));
        eta = caps.eta_floor;
    }
    w.eta = eta;

    // Residual-norm preconditions on the two random parts.
    BoxNormCaps bcaps;
    NormMode mode = n <= bcaps.exact_cap ? NormMode::exact : NormMode::heuristic;
    BoxNormResult n2 = box_norm(g, f2_2, BoxFrame::c1_2, mode, derive_seed(seed, 101), bcaps);
    BoxNormResult n3 = box_norm(g, f3_3, BoxFrame::c12_2, mode, derive_seed(seed, 102), bcaps);
    w.pre2.name = "precondition-norm-(1,2)";
    w.pre2.observed = n2.value;
    w.pre2.bound = eta;
    w.pre2.observational = !n2.exact;
    w.pre2.seed = n2.seed;
    w.pre2.add_param("norm_mode", n2.exact ? "exact" : "heuristic");
    w.pre2.finish();
    w.pre3.name = "precondition-norm-(12,2)";
    w.pre3.observed = n3.value;
    w.pre3.bound = eta;
    w.pre3.observational = !n3.exact;
    w.pre3.seed = n3.seed;
    w.pre3.add_param("norm_mode", n3.exact ? "exact" : "heuristic");
    w.pre3.finish();

    w.d_required = 4.0 * std::pow(double(k), 4.0) / std::pow(eta, 4.0);
    w.hypothesis_met = double(D) > w.d_required;
    if (!w.hypothesis_met)
        w.notes.push_back(fmt("degree %lld is not above the required %.6g", D, w.d_required));

    // All-small tables: the paired conditional-expectation norms depend on the
    // tuple only through the quotients h_j h_i^{-1}.
    std::vector<double> q2 = pair_condexp_sq_s(g, f2_2);
    std::vector<double> q3 = pair_condexp_sq_st(g, f3_3);
    const double small_thr = std::sqrt(2.0 * eta);

    const int* mul = g.mul.data();
    const int* inv = g.inv.data();
    for (int attempt = 1; attempt <= caps.max_attempts; ++attempt) {
        Prng rng(derive_seed(seed, std::uint64_t(attempt)));
        std::vector<int> h(std::size_t(k), 0);
        for (long long i = 0; i < k; ++i) h[std::size_t(i)] = rng.below(n);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < h.size() && ok; ++i)
            for (std::size_t j = i + 1; j < h.size() && ok; ++j) {
                int d = mul[std::size_t(h[j]) * n + inv[h[i]]];
                ok = q2[d] < small_thr && q3[d] < small_thr;
            }
        w.attempts = attempt;
        if (ok) {
            w.found = true;
            w.h = h;
            break;
        }
    }
    if (!w.found)
        fail("NoWitnessTuple",
             fmt("no all-small witness tuple within %d attempts", caps.max_attempts));

    // Auxiliary products and the anti-neighbourhood intersection E.
    w.E = SubsetG::full(n);
    for (std::size_t i = 0; i + 1 < w.h.size(); ++i)
        for (std::size_t j = i + 1; j < w.h.size(); ++j) {
            AuxPair a2;
            a2.i = int(i);
            a2.j = int(j);
            a2.F2 = shifted_product_s(g, f2_2, w.h[i], w.h[j]);
            a2.F3 = shifted_product_st(g, f2_3, w.h[i], w.h[j]);
            AuxPair a3;
            a3.i = int(i);
            a3.j = int(j);
            a3.F2 = shifted_product_s(g, f3_2, w.h[i], w.h[j]);
            a3.F3 = shifted_product_st(g, f3_3, w.h[i], w.h[j]);
            for (const AuxPair* ap : {&a2, &a3}) {
                AntiNbhdSpec sp;
                sp.action = ActionKind::T;
                sp.u = rep_on_gg(n, ap->F2);
                sp.v = rep_on_gg(n, ap->F3);
                sp.eps = eta;
                w.E.bits.and_with(anti_neighbourhood(g, sp, D).set.bits);
            }
            w.aux2.push_back(std::move(a2));
            w.aux3.push_back(std::move(a3));
        }
    w.E.recount();

    // Small-triple-form shift sets for the two triples.
    std::vector<double> t2v = triple_form_per_shift(g, f2_1, f2_2, f2_3);
    std::vector<double> t3v = triple_form_per_shift(g, f3_1, f3_2, f3_3);
    w.C2 = SubsetG(n);
    w.C3 = SubsetG(n);
    for (int gi = 0; gi < n; ++gi) {
        if (std::abs(t2v[gi]) < eps - 1e-12) w.C2.add(gi);
        if (std::abs(t3v[gi]) < eps - 1e-12) w.C3.add(gi);
    }

    // E subset of {h_i^{-1}} * (C2 cap C3), element by element.
    long long violations = 0;
    for (int gi = 0; gi < n; ++gi) {
        if (!w.E.test(gi)) continue;
        bool hit = false;
        for (int x : w.h) {
            int t = mul[std::size_t(x) * n + gi];
            if (w.C2.test(t) && w.C3.test(t)) {
                hit = true;
                break;
            }
        }
        if (!hit) ++violations;
    }
    w.containment = violations == 0;
    if (violations > 0)
        w.notes.push_back(fmt("%lld elements of E miss every translate", violations));
    w.containment_observational = !w.hypothesis_met || !w.pre2.pass || !w.pre3.pass ||
                                  w.pre2.observational || w.pre3.observational;
    return w;
}

PipelineWitness kill_random_f2_pipeline(const GroupTable& g, const FunctionGG& f2_1,
                                        const FunctionGG& f2_2, const FunctionGG& f2_3,
                                        const FunctionGG& f3_1, const FunctionGG& f3_2,
                                        const FunctionGG& f3_3, double eps,
                                        const PipelineCaps& caps, std::uint64_t seed) {
    return kill_random_f2_pipeline(g, f2_1, f2_2, f2_3, f3_1, f3_2, f3_3, eps,
                                   quasirandomness_degree(g), caps, seed);
}

// ---------------------------------------------------------------------------
// The staged syndeticity run
// ---------------------------------------------------------------------------

TheoremDReport theorem_D_pipeline(const GroupTable& g, const SubsetGG& E, double eps,
                                  long long D, const PipelineCaps& caps,
                                  const RegularityCaps& reg_caps, std::uint64_t seed) {
    require(eps > 0.0 && eps < 1.0, "DomainMismatch", "eps must lie in (0,1)");
    require(E.n == g.n, "DomainMismatch", "subset order does not match the group");
    require(D >= 1, "DomainMismatch", "degree must be at least 1");
    const int n = g.n;
    const long long nn = 1ll * n * n;

    TheoremDReport r;
    r.eps = eps;
    r.D = D;
    r.seed = seed;
    r.delta = E.density();

    // ---- stage one: tame the random parts of the second and third slots ----
    // Tuple size and tolerance exactly as the inner witness search derives them
    // from its working accuracy eps/3.
    const double eps3 = eps / 3.0;
    double k_formula = std::ceil(4.0 / (eps3 * eps3));
    long long k = 1;
    if (k_formula > double(caps.k_cap)) {
        k = caps.k_cap;
        r.cap_events.push_back(
            fmt("witness size capped at %lld (formula wants %.0f)", k, k_formula));
    } else if (k_formula > 1.0) {
        k = (long long)k_formula;
    }
    r.k = k;
    double eta = std::pow(3.0 * double(k), -8.0);
    if (eta < caps.eta_floor) {
        r.cap_events.push_back(
            fmt("coarse tolerance floored at %g (formula wants %g)", caps.eta_floor, eta));
        eta = caps.eta_floor;
    }
    r.eta = eta;

    FunctionGG f = E.indicator();
    r.d2 = weak_regularity(g, f, eta, 2, reg_caps, derive_seed(seed, 2));
    r.d3 = weak_regularity(g, f, eta, 3, reg_caps, derive_seed(seed, 3));
    r.M2 = r.d2.cells_product();
    r.M3 = r.d3.cells_product();
    for (const DecompositionGG* d : {&r.d2, &r.d3})
        if (d->stop != StopReason::residual_below_eta)
            r.cap_events.push_back(
                fmt("frame-%d decomposition stopped at %s with certified residual %.6g "
                    "above target %.6g",
                    d->frame, stop_name(d->stop), d->certified_residual, d->eta));

    r.witness = kill_random_f2_pipeline(g, f, r.d2.residual, f, f, r.d2.structured,
                                        r.d3.residual, eps3, D, caps, derive_seed(seed, 10));
    r.C2 = r.witness.C2;
    r.C3 = r.witness.C3;
    bool d2_cert = r.d2.stop == StopReason::residual_below_eta && r.d2.residual_exact &&
                   r.d2.certified_residual <= eta + 1e-12;
    bool d3_cert = r.d3.stop == StopReason::residual_below_eta && r.d3.residual_exact &&
                   r.d3.certified_residual <= eta + 1e-12;
    bool witness_guaranteed = r.witness.hypothesis_met && d2_cert && d3_cert;

    // ---- stage two: fine decomposition of the first slot ----
    double eta_p = eps / (6.0 * double(r.M2) * double(r.M3));
    bool eta_p_floored = false;
    if (eta_p < caps.eta_floor) {
        r.cap_events.push_back(
            fmt("fine tolerance floored at %g (formula wants %g)", caps.eta_floor, eta_p));
        eta_p = caps.eta_floor;
        eta_p_floored = true;
    }
    r.eta_prime = eta_p;
    r.d1 = weak_regularity(g, f, eta_p, 1, reg_caps, derive_seed(seed, 1));
    if (r.d1.stop != StopReason::residual_below_eta)
        r.cap_events.push_back(
            fmt("frame-1 decomposition stopped at %s with certified residual %.6g "
                "above target %.6g",
                stop_name(r.d1.stop), r.d1.certified_residual, r.d1.eta));
    long long M1 = r.d1.cells_product();
    r.hyp_D_partitions_rhs = 16.0 * double(M1) * double(M1) * double(r.M2) *
                             double(r.M2) * double(r.M3) * double(r.M3) / (eps * eps);
    r.hyp_D_partitions = double(D) >= r.hyp_D_partitions_rhs;

    std::vector<double> t1v =
        triple_form_per_shift(g, r.d1.residual, r.d2.structured, r.d3.structured);
    r.C1 = SubsetG(n);
    for (int gi = 0; gi < n; ++gi)
        if (std::abs(t1v[gi]) < eps3 - 1e-12) r.C1.add(gi);

    r.C = r.C1;
    r.C.bits.and_with(r.C2.bits);
    r.C.bits.and_with(r.C3.bits);
    r.C.recount();

    // ---- stage three: product anti-neighbourhoods trapping the first slot ----
    // One pair (m2, m3) of summands contributes
    //   psi(x,y) = residual1(x,y) . second2[m2](y) . first3[m3](x^{-1}y)
    //   phi(x)   = first2[m2](x) . second3[m3](x)
    // and the S-action correlation reduces to a one-variable convolution:
    // <psi, S^g phi> = avg_x psibar(x) phi(gx) with psibar the row means, while
    // the projections contribute mean(psi) mean(phi).
    Summands s2 = summands(g, r.d2);
    Summands s3 = summands(g, r.d3);
    const long long total_pairs = (long long)s2.first.size() * (long long)s3.first.size();
    const int use_pairs =
        total_pairs > caps.max_pairs ? caps.max_pairs : int(total_pairs);
    r.pairs_used = use_pairs;
    r.pairs_capped = use_pairs < total_pairs;
    if (r.pairs_capped)
        r.cap_events.push_back(fmt("anti-neighbourhood family capped at %d of %lld pairs",
                                   use_pairs, total_pairs));

    const int* mul = g.mul.data();
    const int* inv = g.inv.data();
    const int c3count = int(s3.first.size());
    std::vector<char> pair_ok(std::size_t(std::max(use_pairs, 1)) * n, 1);
    parallel_for(use_pairs, [&](std::int64_t p) {
        const int m2 = int(p) / std::max(c3count, 1);
        const int m3 = int(p) % std::max(c3count, 1);
        const std::vector<double>& u2 = s2.second[std::size_t(m2)]; // of y
        const std::vector<double>& w3 = s3.first[std::size_t(m3)];  // of x^{-1}y
        const std::vector<double>& a2 = s2.first[std::size_t(m2)];  // of x
        const std::vector<double>& b3 = s3.second[std::size_t(m3)]; // of x
        std::vector<double> psibar(std::size_t(n), 0.0), phi(std::size_t(n), 0.0);
        double psi_mean = 0.0, phi_mean = 0.0;
        for (int x = 0; x < n; ++x) {
            const int* zrow = mul + std::size_t(inv[x]) * n;
            const double* frow = r.d1.residual.v.data() + std::size_t(x) * n;
            double s = 0.0;
            for (int y = 0; y < n; ++y) s += frow[y] * u2[y] * w3[zrow[y]];
            psibar[std::size_t(x)] = s / n;
            psi_mean += psibar[std::size_t(x)];
            phi[std::size_t(x)] = a2[std::size_t(x)] * b3[std::size_t(x)];
            phi_mean += phi[std::size_t(x)];
        }
        psi_mean /= n;
        phi_mean /= n;
        const double target = psi_mean * phi_mean;
        char* row = pair_ok.data() + std::size_t(p) * n;
        for (int gi = 0; gi < n; ++gi) {
            const int* grow = mul + std::size_t(gi) * n;
            double s = 0.0;
            for (int x = 0; x < n; ++x) s += psibar[std::size_t(x)] * phi[grow[x]];
            s /= n;
            row[gi] = std::abs(s - target) < r.eta_prime - 1e-12 ? 1 : 0;
        }
    });
    r.E_prime = SubsetG::full(n);
    for (int p = 0; p < use_pairs; ++p) {
        const char* row = pair_ok.data() + std::size_t(p) * n;
        for (int gi = 0; gi < n; ++gi)
            if (!row[gi]) r.E_prime.remove(gi);
    }

    bool d1_cert = r.d1.stop == StopReason::residual_below_eta && r.d1.residual_exact &&
                   r.d1.certified_residual <= eta_p + 1e-12;
    bool ep_guaranteed = !eta_p_floored && d1_cert && !r.pairs_capped;
    long long viol_ep = 0;
    for (int gi = 0; gi < n; ++gi)
        if (r.E_prime.test(gi) && !r.C1.test(gi)) ++viol_ep;

    // ---- stage four: pulled-back intersections and the covering step ----
    r.E_dprime = SubsetG(n);
    for (int gi = 0; gi < n; ++gi) {
        bool all_in = true;
        for (int x : r.witness.h)
            if (!r.E_prime.test(mul[std::size_t(x) * n + gi])) {
                all_in = false;
                break;
            }
        if (all_in) r.E_dprime.add(gi);
    }

    long long viol_fc = 0;
    for (int gi = 0; gi < n; ++gi) {
        if (!(r.witness.E.test(gi) && r.E_dprime.test(gi))) continue;
        bool hit = false;
        for (int x : r.witness.h)
            if (r.C.test(mul[std::size_t(x) * n + gi])) {
                hit = true;
                break;
            }
        if (!hit) ++viol_fc;
    }

    // Shift-set comparison against the exact census: on C1 cap C2 cap C3 the
    // three small triple forms force count(g)/n^2 above psi(g) - eps.
    CornerCensus census = corner_census(g, E, PatternKind::bmz, std::max(2500, n));
    std::vector<double> psi =
        triple_form_per_shift(g, r.d1.structured, r.d2.structured, r.d3.structured);
    long long viol_loose = 0, viol_tight = 0;
    for (int gi = 0; gi < n; ++gi) {
        if (!r.C.test(gi)) continue;
        if (!ratio_ge(census.counts[std::size_t(gi)], nn, psi[std::size_t(gi)] - eps))
            ++viol_loose;
        if (!ratio_ge(census.counts[std::size_t(gi)], nn, psi[std::size_t(gi)] - eps / 2.0))
            ++viol_tight;
    }

    // Covering certificate for C.
    const double family = 2.0 * double(k) * double(k) + double(k) * double(r.M2) * double(r.M3);
    const double min_tol = std::min(eta, eta_p);
    r.K0 = std::ceil(2.0 * family / (min_tol * min_tol) + 1.0);
    r.d_required_cover = std::pow(r.K0, 6.0) * family + 1.0;
    long long coverK = caps.K_cap;
    if (r.K0 <= double(caps.K_cap)) {
        coverK = (long long)r.K0;
    } else {
        r.cap_events.push_back(
            fmt("cover size capped at %lld (formula wants %.6g)", coverK, r.K0));
    }
    bool cover_skipped = r.C.card == 0;
    if (cover_skipped) {
        r.cap_events.push_back("shift set C is empty; no covering attempted");
        r.cert = SyndeticityCertificate{};
        r.cert.method = CoverMode::greedy;
    } else {
        r.cert = syndetic_cover(g, r.C, CoverMode::greedy, coverK);
    }

    r.B = good_set(census, std::pow(r.delta.to_double(), 4.0) - eps);
    r.measure_C = r.C.measure();
    r.measure_B = r.B.measure();

    // ---- checks ----
    r.checks.push_back(r.witness.pre2);
    r.checks.push_back(r.witness.pre3);

    BoundCheck c_ep;
    c_ep.name = "e-prime-in-c1";
    c_ep.observed = double(viol_ep);
    c_ep.bound = 0.0;
    c_ep.observational = !ep_guaranteed;
    c_ep.add_param("eta_prime", r.eta_prime);
    c_ep.add_param("pairs_used", double(r.pairs_used));
    c_ep.add_param("guaranteed", ep_guaranteed ? "true" : "false");
    c_ep.finish();
    r.checks.push_back(c_ep);

    BoundCheck c_fc;
    c_fc.name = "final-containment";
    c_fc.observed = double(viol_fc);
    c_fc.bound = 0.0;
    // Whenever the two ingredient containments verified exactly, this one is
    // their logical consequence and must hold; otherwise it is a report.
    c_fc.observational = !(r.witness.containment && viol_ep == 0);
    c_fc.add_param("guaranteed",
                   (ep_guaranteed && witness_guaranteed) ? "true" : "false");
    c_fc.finish();
    r.checks.push_back(c_fc);

    BoundCheck c_loose;
    c_loose.name = "triple-threshold-containment";
    c_loose.observed = double(viol_loose);
    c_loose.bound = 0.0;
    c_loose.add_param("threshold_slack", eps);
    c_loose.finish();
    r.checks.push_back(c_loose);

    BoundCheck c_tight;
    c_tight.name = "triple-threshold-tight";
    c_tight.observed = double(viol_tight);
    c_tight.bound = 0.0;
    c_tight.observational = true;
    c_tight.add_param("threshold_slack", eps / 2.0);
    c_tight.finish();
    r.checks.push_back(c_tight);

    BoundCheck c_cover;
    c_cover.name = "cover-certificate";
    c_cover.kind = "lower";
    c_cover.observed = r.cert.coverage ? 1.0 : 0.0;
    c_cover.bound = 1.0;
    c_cover.observational = true;
    c_cover.vacuous = cover_skipped;
    c_cover.add_param("K", double(r.cert.K));
    c_cover.add_param("K0", r.K0);
    c_cover.add_param("lower_bound", double(r.cert.lower_bound));
    c_cover.finish();
    r.checks.push_back(c_cover);

    r.all_nonvacuous_pass = true;
    for (const BoundCheck& c : r.checks)
        if (!c.observational && !c.vacuous && !c.pass) r.all_nonvacuous_pass = false;
    return r;
}

TheoremDReport theorem_D_pipeline(const GroupTable& g, const SubsetGG& E, double eps,
                                  const PipelineCaps& caps, const RegularityCaps& reg_caps,
                                  std::uint64_t seed) {
    return theorem_D_pipeline(g, E, eps, quasirandomness_degree(g), caps, reg_caps, seed);
}

} // namespace qrg
