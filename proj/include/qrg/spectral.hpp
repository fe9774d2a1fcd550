#pragma once

// Spectral side of the toolkit.
//
// The central quantity is D(G): the least dimension of a nontrivial complex
// irreducible representation.  It is computed by an oracle that needs no
// character theory: pick random complex coefficients per conjugacy class, form
// the convolution matrix of that central element on the regular representation,
// and read off eigenvalue cluster multiplicities m_i = d_i^2.  A closed-form
// registry for the built-in families cross-checks the oracle.
//
// The *_check functions each evaluate one inequality exactly as stated, with
// observed value, bound, and a vacuous flag when the bound exceeds the trivial
// estimate.  Checks use observed <= bound + 1e-12 to absorb rounding.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrg/gg.hpp"
#include "qrg/group.hpp"

namespace qrg {

struct DegreeMultiset {
    int n = 0;
    int class_count = 0;
    std::vector<int> degrees; // ascending, with multiplicity

    long long sum_squares() const {
        long long s = 0;
        for (int d : degrees) s += 1ll * d * d;
        return s;
    }
};

struct RepVector {
    enum class Domain { G, GG };
    Domain domain = Domain::G;
    int n = 0; // group order; dimension is n or n*n
    std::vector<double> v;

    std::size_t dim() const { return v.size(); }
    double mean() const {
        double s = 0.0;
        for (double x : v) s += x;
        return s / double(v.size());
    }
    double norm() const {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s / double(v.size()));
    }
};

// Inner products average over the domain, so constants have norm |c|.
double inner(const RepVector& a, const RepVector& b);

RepVector rep_on_g(int n, std::vector<double> values);
RepVector rep_on_gg(int n, const FunctionGG& f);
RepVector random_unit_rep(RepVector::Domain domain, int n, std::uint64_t seed);

struct BoundCheck {
    std::string name;
    std::string kind = "upper"; // "upper": pass iff observed <= bound (+slack)
    double observed = 0.0;
    double bound = 0.0;
    bool vacuous = false;
    bool pass = false;
    bool observational = false; // heuristic certificate or unmet precondition
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> params;

    void finish() {
        pass = kind == "upper" ? observed <= bound + 1e-12 : observed >= bound - 1e-12;
    }
    void add_param(const std::string& k, const std::string& v) { params.emplace_back(k, v); }
    void add_param(const std::string& k, double v);
};

// Degree oracle.  Retries with fresh coefficients up to max_retries when the
// spectrum fails to cluster cleanly; raises DegenerateSpectrum after that.
// cap bounds the dense eigensolve size (CapExceeded beyond it).
DegreeMultiset irrep_degrees(const GroupTable& g, std::uint64_t seed = 42, int cap = 2500,
                             int max_retries = 5);

// Closed-form degrees for registry families (including products of registry
// families); nullopt when the family is not tabulated.
std::optional<std::vector<int>> registry_degrees(const GroupTable& g);

// Least nontrivial irreducible dimension.  Uses the oracle when the order is
// within cap, otherwise the registry; errors with CapExceeded when neither
// applies, and RegistryOracleMismatch when the two disagree.
long long quasirandomness_degree(const GroupTable& g, std::uint64_t seed = 42, int cap = 2500);

// Conditional expectation onto the invariant sub-sigma-algebra of an action on
// G x G: S-invariant functions depend on y only, T-invariant on x only,
// ST-invariant on x^{-1}y only; Full gives the constant mean.
enum class Invariant { S, T, ST, Full };
FunctionGG invariant_expectation(const GroupTable& g, const FunctionGG& f, Invariant which);

// sum_y w_y |<v,u_y>|  <=  sqrt( sum_{y,y'} w_y w_{y'} |<u_y,u_{y'}>| )
// for a unit v; weights must be a probability vector.
BoundCheck van_der_corput_check(const std::vector<RepVector>& family,
                                const std::vector<double>& weights, const RepVector& v);

// avg_g ( <u, R^g v> - mean(u) mean(v) )^2  <=  ||u||^2 ||v||^2 / D
// for the regular representation (R^g v)(x) = v(gx).
BoundCheck rep_mixing_check(const GroupTable& g, const RepVector& u, const RepVector& v,
                            long long D);

// || avg_g u(ga) v(gb) - mean(u) mean(v) ||_2  <=  ||u|| ||v|| / sqrt(D)
// on G x G, i.e. the fixed-space projection of a tensor is close to the tensor
// of the fixed-space projections.
BoundCheck tensor_projection_check(const GroupTable& g, const RepVector& u,
                                   const RepVector& v, long long D);

// avg_g | int F1(x,y) F2(g^{-1}x, gy) dmu - mean(F1) mean(F2) |
//   <=  2 ||F1||_2 ||F2||_2 / sqrt(D)
BoundCheck twisted_mixing_check(const GroupTable& g, const FunctionGG& F1,
                                const FunctionGG& F2, long long D);

// | avg_{x,y} h1(x) h2(y) h12(x^{-1}y) - mean(h1) mean(h2) mean(h12) |
//   <=  1 / sqrt(D)   for h's with values in [-1,1].
BoundCheck triple_convolution_check(const GroupTable& g, const std::vector<double>& h1,
                                    const std::vector<double>& h2,
                                    const std::vector<double>& h12, long long D);

} // namespace qrg
