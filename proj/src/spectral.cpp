#include "qrg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qrg/parallel.hpp"
#include "qrg/rng.hpp"

namespace qrg {

// ---- RepVector ----

double inner(const RepVector& a, const RepVector& b) {
    require(a.domain == b.domain && a.n == b.n && a.dim() == b.dim(), "DomainMismatch",
            "inner product needs matching domains");
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
    return s / double(a.v.size());
}

RepVector rep_on_g(int n, std::vector<double> values) {
    require(int(values.size()) == n, "DomainMismatch", "vector length must equal group order");
    RepVector r;
    r.domain = RepVector::Domain::G;
    r.n = n;
    r.v = std::move(values);
    return r;
}

RepVector rep_on_gg(int n, const FunctionGG& f) {
    require(f.n == n, "DomainMismatch", "function order must equal group order");
    RepVector r;
    r.domain = RepVector::Domain::GG;
    r.n = n;
    r.v = f.v;
    return r;
}

RepVector random_unit_rep(RepVector::Domain domain, int n, std::uint64_t seed) {
    RepVector r;
    r.domain = domain;
    r.n = n;
    std::size_t d = domain == RepVector::Domain::G ? std::size_t(n) : std::size_t(n) * n;
    r.v.resize(d);
    Prng rng(seed);
    double ss = 0.0;
    for (double& x : r.v) {
        x = rng.normal();
        ss += x * x;
    }
    // Normalize in the averaging inner product: ||r||^2 = ss/d.
    double scale = std::sqrt(double(d) / (ss > 0.0 ? ss : 1.0));
    for (double& x : r.v) x *= scale;
    return r;
}

void BoundCheck::add_param(const std::string& k, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    params.emplace_back(k, buf);
}

// ---- degree oracle ----

DegreeMultiset irrep_degrees(const GroupTable& g, std::uint64_t seed, int cap,
                             int max_retries) {
    int n = g.n;
    require(n <= cap, "CapExceeded",
            "order " + std::to_string(n) + " exceeds eigensolver cap " + std::to_string(cap));
    auto classes = conjugacy_classes(g);
    int r = int(classes.size());
    std::vector<int> class_of(n);
    for (int c = 0; c < r; ++c)
        for (int x : classes[c]) class_of[x] = c;

    std::string last_issue = "none";
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Prng rng(derive_seed(seed, std::uint64_t(attempt)));
        // Random complex coefficient per class.  A class function c makes the
        // convolution matrix normal, and on each isotypic component it acts as
        // a scalar, so each irreducible of dimension d contributes one
        // eigenvalue with multiplicity d^2.  Complex coefficients keep
        // conjugate-pair representations from sharing an eigenvalue.
        std::vector<std::complex<double>> coeff(r);
        for (auto& z : coeff)
            z = {2.0 * rng.unit() - 1.0, 2.0 * rng.unit() - 1.0};

        Eigen::MatrixXcd M(n, n);
        for (int x = 0; x < n; ++x)
            for (int z = 0; z < n; ++z)
                M(x, z) = coeff[class_of[g.op(x, g.inv[z])]];

        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(M, /*computeEigenvectors=*/false);
        if (solver.info() != Eigen::Success) { last_issue = "eigensolver failure"; continue; }
        std::vector<std::complex<double>> ev(n);
        for (int i = 0; i < n; ++i) ev[i] = solver.eigenvalues()(i);

        // Single-linkage clustering with a relative gap of 1e-6.
        double scale = 0.0;
        for (auto z : ev) scale = std::max(scale, std::abs(z));
        double tol = 1e-6 * std::max(1.0, scale);
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int a) {
            while (parent[a] != a) { parent[a] = parent[parent[a]]; a = parent[a]; }
            return a;
        };
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (std::abs(ev[i] - ev[j]) <= tol) {
                    int ri = find(i), rj = find(j);
                    if (ri != rj) parent[ri] = rj;
                }
        std::map<int, int> size;
        for (int i = 0; i < n; ++i) ++size[find(i)];

        if (int(size.size()) != r) { last_issue = "cluster count != class count"; continue; }
        std::vector<int> degrees;
        bool ok = true;
        for (auto& [root, m] : size) {
            double d = std::sqrt(double(m));
            int di = int(std::lround(d));
            if (std::abs(d - di) > 1e-6 || di < 1) { ok = false; break; }
            degrees.push_back(di);
        }
        if (!ok) { last_issue = "cluster multiplicity is not a square"; continue; }
        std::sort(degrees.begin(), degrees.end());
        long long ss = 0;
        for (int d : degrees) ss += 1ll * d * d;
        if (ss != n) { last_issue = "degree squares do not sum to order"; continue; }
        if (degrees.front() != 1) { last_issue = "missing one-dimensional cluster"; continue; }

        DegreeMultiset out;
        out.n = n;
        out.class_count = r;
        out.degrees = std::move(degrees);
        return out;
    }
    fail("DegenerateSpectrum", "no clean eigenvalue clustering after " +
                                   std::to_string(max_retries) + " attempts (" + last_issue + ")");
}

// ---- registry ----

namespace {

std::optional<std::vector<int>> registry_for_spec(const GroupSpec& spec) {
    using F = GroupSpec::Family;
    switch (spec.family) {
        case F::cyclic: {
            if (spec.param < 1) return std::nullopt;
            return std::vector<int>(std::size_t(spec.param), 1);
        }
        case F::dihedral: {
            int n = spec.param;
            if (n < 1) return std::nullopt;
            std::vector<int> d;
            if (n == 1) return std::vector<int>{1, 1};
            if (n == 2) return std::vector<int>{1, 1, 1, 1};
            if (n % 2 == 1) {
                d.assign(2, 1);
                d.insert(d.end(), std::size_t((n - 1) / 2), 2);
            } else {
                d.assign(4, 1);
                d.insert(d.end(), std::size_t(n / 2 - 1), 2);
            }
            return d;
        }
        case F::symmetric:
            switch (spec.param) {
                case 1: return std::vector<int>{1};
                case 2: return std::vector<int>{1, 1};
                case 3: return std::vector<int>{1, 1, 2};
                case 4: return std::vector<int>{1, 1, 2, 3, 3};
                case 5: return std::vector<int>{1, 1, 4, 4, 5, 5, 6};
                case 6: return std::vector<int>{1, 1, 5, 5, 5, 5, 9, 9, 10, 10, 16};
                case 7: return std::vector<int>{1, 1, 6, 6, 14, 14, 14, 14, 15, 15, 20, 21, 21, 35, 35};
                default: return std::nullopt;
            }
        case F::alternating:
            switch (spec.param) {
                case 1: return std::vector<int>{1};
                case 2: return std::vector<int>{1};
                case 3: return std::vector<int>{1, 1, 1};
                case 4: return std::vector<int>{1, 1, 1, 3};
                case 5: return std::vector<int>{1, 3, 3, 4, 5};
                case 6: return std::vector<int>{1, 5, 5, 8, 8, 9, 10};
                case 7: return std::vector<int>{1, 6, 10, 10, 14, 14, 15, 21, 35};
                default: return std::nullopt;
            }
        case F::sl2:
            switch (spec.param) {
                case 2: return std::vector<int>{1, 1, 2}; // sl2(2) ~ symmetric(3)
                case 3: return std::vector<int>{1, 1, 1, 2, 2, 2, 3};
                case 5: return std::vector<int>{1, 2, 2, 3, 3, 4, 4, 5, 6};
                case 7: return std::vector<int>{1, 3, 3, 4, 4, 6, 6, 6, 7, 8, 8};
                default: return std::nullopt;
            }
        case F::psl2:
            switch (spec.param) {
                case 3: return std::vector<int>{1, 1, 1, 3}; // psl2(3) ~ alternating(4)
                case 5: return std::vector<int>{1, 3, 3, 4, 5};
                case 7: return std::vector<int>{1, 3, 3, 6, 7, 8};
                case 11: return std::vector<int>{1, 5, 5, 10, 10, 11, 12, 12};
                case 13: return std::vector<int>{1, 7, 7, 12, 12, 12, 13, 14, 14};
                default: return std::nullopt;
            }
        case F::product: {
            auto a = registry_for_spec(spec.factors[0]);
            auto b = registry_for_spec(spec.factors[1]);
            if (!a || !b) return std::nullopt;
            std::vector<int> d;
            for (int x : *a)
                for (int y : *b) d.push_back(x * y);
            std::sort(d.begin(), d.end());
            return d;
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<std::vector<int>> registry_degrees(const GroupTable& g) {
    if (g.family.empty()) return std::nullopt;
    GroupSpec spec;
    try {
        spec = GroupSpec::parse(g.family);
    } catch (const Error&) {
        return std::nullopt;
    }
    return registry_for_spec(spec);
}

namespace {

long long min_nontrivial_degree(const std::vector<int>& degrees) {
    // Drop one copy of the trivial dimension, take the minimum of the rest.
    std::vector<int> d = degrees;
    auto it = std::find(d.begin(), d.end(), 1);
    require(it != d.end(), "DegenerateSpectrum", "degree multiset lacks the trivial dimension");
    d.erase(it);
    if (d.empty()) return std::numeric_limits<long long>::max(); // trivial group
    return *std::min_element(d.begin(), d.end());
}

} // namespace

long long quasirandomness_degree(const GroupTable& g, std::uint64_t seed, int cap) {
    auto reg = registry_degrees(g);
    if (g.n <= cap) {
        DegreeMultiset oracle = irrep_degrees(g, seed, cap);
        if (reg && *reg != oracle.degrees)
            fail("RegistryOracleMismatch",
                 "registry and oracle disagree on irreducible degrees for " + g.family);
        return min_nontrivial_degree(oracle.degrees);
    }
    if (reg) return min_nontrivial_degree(*reg);
    fail("CapExceeded", "order " + std::to_string(g.n) +
                            " exceeds the eigensolver cap and no registry entry applies");
}

// ---- invariant expectations ----

FunctionGG invariant_expectation(const GroupTable& g, const FunctionGG& f, Invariant which) {
    require(f.n == g.n, "DomainMismatch", "function order must equal group order");
    int n = g.n;
    FunctionGG out(n, 0.0, f.lo, f.hi);
    switch (which) {
        case Invariant::S: {
            // Average over x: depends on y only.
            for (int y = 0; y < n; ++y) {
                double s = 0.0;
                for (int x = 0; x < n; ++x) s += f.at(x, y);
                s /= double(n);
                for (int x = 0; x < n; ++x) out.at(x, y) = s;
            }
            break;
        }
        case Invariant::T: {
            for (int x = 0; x < n; ++x) {
                double s = 0.0;
                for (int y = 0; y < n; ++y) s += f.at(x, y);
                s /= double(n);
                for (int y = 0; y < n; ++y) out.at(x, y) = s;
            }
            break;
        }
        case Invariant::ST: {
            // Diagonal orbits are the level sets of x^{-1}y, each of size n.
            std::vector<double> sum(n, 0.0);
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y) sum[g.op(g.inv[x], y)] += f.at(x, y);
            for (double& s : sum) s /= double(n);
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y) out.at(x, y) = sum[g.op(g.inv[x], y)];
            break;
        }
        case Invariant::Full: {
            double m = f.mean();
            for (double& x : out.v) x = m;
            break;
        }
    }
    return out;
}

// ---- inequality checks ----

BoundCheck van_der_corput_check(const std::vector<RepVector>& family,
                                const std::vector<double>& weights, const RepVector& v) {
    require(!family.empty() && family.size() == weights.size(), "DomainMismatch",
            "family and weights must be nonempty and equal length");
    double wsum = 0.0;
    for (double w : weights) {
        require(w >= -1e-15, "DomainMismatch", "weights must be nonnegative");
        wsum += w;
    }
    require(std::abs(wsum - 1.0) <= 1e-9, "DomainMismatch", "weights must sum to 1");
    require(std::abs(v.norm() - 1.0) <= 1e-9, "NotUnitVector", "v must be a unit vector");

    BoundCheck c;
    c.name = "van-der-corput";
    double lhs = 0.0;
    for (std::size_t y = 0; y < family.size(); ++y)
        lhs += weights[y] * std::abs(inner(v, family[y]));
    double rhs2 = 0.0;
    for (std::size_t y = 0; y < family.size(); ++y)
        for (std::size_t z = 0; z < family.size(); ++z)
            rhs2 += weights[y] * weights[z] * std::abs(inner(family[y], family[z]));
    c.observed = lhs;
    c.bound = std::sqrt(std::max(0.0, rhs2));
    c.vacuous = false;
    c.finish();
    return c;
}

BoundCheck rep_mixing_check(const GroupTable& g, const RepVector& u, const RepVector& v,
                            long long D) {
    require(u.domain == RepVector::Domain::G && v.domain == RepVector::Domain::G &&
                u.n == g.n && v.n == g.n,
            "DomainMismatch", "rep_mixing_check needs vectors on G");
    int n = g.n;
    double mu = u.mean(), mv = v.mean();
    std::vector<double> dev(n);
    parallel_for(n, [&](std::int64_t gi) {
        double s = 0.0;
        const int* row = g.mul.data() + std::size_t(gi) * n;
        for (int x = 0; x < n; ++x) s += u.v[x] * v.v[row[x]];
        s /= double(n);
        dev[gi] = (s - mu * mv) * (s - mu * mv);
    });
    double obs = 0.0;
    for (double d : dev) obs += d;
    obs /= double(n);

    BoundCheck c;
    c.name = "rep-mixing";
    double nu2 = u.norm() * u.norm(), nv2 = v.norm() * v.norm();
    c.observed = obs;
    c.bound = nu2 * nv2 / double(D);
    c.vacuous = c.bound >= nu2 * nv2 - 1e-15;
    c.add_param("D", double(D));
    c.finish();
    return c;
}

BoundCheck tensor_projection_check(const GroupTable& g, const RepVector& u,
                                   const RepVector& v, long long D) {
    require(u.domain == RepVector::Domain::G && v.domain == RepVector::Domain::G &&
                u.n == g.n && v.n == g.n,
            "DomainMismatch", "tensor_projection_check needs vectors on G");
    int n = g.n;
    double mu = u.mean(), mv = v.mean();
    std::vector<double> rowsum(n, 0.0);
    parallel_for(n, [&](std::int64_t a) {
        double acc = 0.0;
        for (int b = 0; b < n; ++b) {
            double p = 0.0;
            for (int gi = 0; gi < n; ++gi)
                p += u.v[g.op(gi, int(a))] * v.v[g.op(gi, b)];
            p /= double(n);
            double d = p - mu * mv;
            acc += d * d;
        }
        rowsum[a] = acc;
    });
    double ss = 0.0;
    for (double s : rowsum) ss += s;
    ss /= double(n) * double(n);

    BoundCheck c;
    c.name = "tensor-projection";
    c.observed = std::sqrt(ss);
    c.bound = u.norm() * v.norm() / std::sqrt(double(D));
    c.vacuous = c.bound >= u.norm() * v.norm() - 1e-15;
    c.add_param("D", double(D));
    c.finish();
    return c;
}

BoundCheck twisted_mixing_check(const GroupTable& g, const FunctionGG& F1,
                                const FunctionGG& F2, long long D) {
    require(F1.n == g.n && F2.n == g.n, "DomainMismatch", "functions must live on G x G");
    int n = g.n;
    double m1 = F1.mean(), m2 = F2.mean();
    std::vector<double> dev(n);
    parallel_for(n, [&](std::int64_t gi) {
        int ginv = g.inv[gi];
        double s = 0.0;
        for (int x = 0; x < n; ++x) {
            int xs = g.op(ginv, x);
            const double* r2 = F2.v.data() + std::size_t(xs) * n;
            const double* r1 = F1.v.data() + std::size_t(x) * n;
            const int* grow = g.mul.data() + std::size_t(gi) * n;
            double t = 0.0;
            for (int y = 0; y < n; ++y) t += r1[y] * r2[grow[y]];
            s += t;
        }
        s /= double(n) * double(n);
        dev[gi] = std::abs(s - m1 * m2);
    });
    double obs = 0.0;
    for (double d : dev) obs += d;
    obs /= double(n);

    BoundCheck c;
    c.name = "twisted-mixing";
    c.observed = obs;
    c.bound = 2.0 * F1.l2_norm() * F2.l2_norm() / std::sqrt(double(D));
    c.vacuous = c.bound >= 2.0 * F1.linf_norm() * F2.linf_norm() - 1e-15;
    c.add_param("D", double(D));
    c.finish();
    return c;
}

BoundCheck triple_convolution_check(const GroupTable& g, const std::vector<double>& h1,
                                    const std::vector<double>& h2,
                                    const std::vector<double>& h12, long long D) {
    int n = g.n;
    require(int(h1.size()) == n && int(h2.size()) == n && int(h12.size()) == n,
            "DomainMismatch", "h vectors must have length n");
    for (const auto* h : {&h1, &h2, &h12})
        for (double x : *h)
            if (std::abs(x) > 1.0 + 1e-12)
                fail("RangeViolation", "triple_convolution_check needs values in [-1,1]");
    double m1 = 0.0, m2 = 0.0, m12 = 0.0;
    for (int i = 0; i < n; ++i) { m1 += h1[i]; m2 += h2[i]; m12 += h12[i]; }
    m1 /= n; m2 /= n; m12 /= n;
    double t = 0.0;
    for (int x = 0; x < n; ++x) {
        const int* row = g.mul.data() + std::size_t(g.inv[x]) * n;
        double s = 0.0;
        for (int y = 0; y < n; ++y) s += h2[y] * h12[row[y]];
        t += h1[x] * s;
    }
    t /= double(n) * double(n);

    BoundCheck c;
    c.name = "triple-convolution";
    c.observed = std::abs(t - m1 * m2 * m12);
    c.bound = 1.0 / std::sqrt(double(D));
    c.vacuous = c.bound >= 2.0;
    c.add_param("D", double(D));
    c.finish();
    return c;
}

} // namespace qrg
