#pragma once

// Anti-neighbourhoods, syndeticity certificates, and the staged run that
// certifies the shift set of dense corner configurations as syndetic.
//
// For an action pi of G (the regular action on G, or the coordinate actions
// S^g(x,y) = (gx,y), T^g(x,y) = (x,gy), (ST)^g(x,y) = (gx,gy) on G x G), the
// anti-neighbourhood of vectors u, v at tolerance eps is
//
//   A(pi, u, v, eps) = { g : |<u, pi^g v> - <Pu, Pv>| < eps },
//
// where P projects onto the action's fixed space (constants for the regular
// action; functions of y, of x, and of x^{-1}y for S, T, ST).  For unit u, v
// the measure of A is at least 1 - 1/(D eps^2), where D is the least dimension
// of a nontrivial irreducible representation.
//
// Large intersections of anti-neighbourhoods are syndetic: a bounded number of
// left translates covers the group.  The staged run combines three weak
// regularity decompositions, the averaged triple-form machinery, and these
// covering arguments to certify that the popular-shift set of a dense subset
// of G x G is syndetic, checking every inequality along the way.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrg/boxnorm.hpp"
#include "qrg/gg.hpp"
#include "qrg/group.hpp"
#include "qrg/rational.hpp"
#include "qrg/regularity.hpp"
#include "qrg/spectral.hpp"

namespace qrg {

// ---------------------------------------------------------------------------
// Anti-neighbourhoods
// ---------------------------------------------------------------------------

enum class ActionKind { regular, S, T, ST };

inline const char* action_name(ActionKind a) {
    switch (a) {
        case ActionKind::regular: return "regular";
        case ActionKind::S: return "S";
        case ActionKind::T: return "T";
        default: return "ST";
    }
}

struct AntiNbhdSpec {
    ActionKind action = ActionKind::regular;
    RepVector u, v; // on G for the regular action, on G x G otherwise
    double eps = 0.0;
};

struct AntiNbhd {
    SubsetG set;                    // A(pi, u, v, eps)
    std::vector<double> deviations; // |<u, pi^g v> - <Pu, Pv>| per g
    double projection_term = 0.0;   // <Pu, Pv>
    BoundCheck measure_check;       // m_G(A) >= max(0, 1 - 1/(D eps^2)) for unit u, v
};

// The overload without a degree obtains D from the spectral oracle.
AntiNbhd anti_neighbourhood(const GroupTable& g, const AntiNbhdSpec& spec);
AntiNbhd anti_neighbourhood(const GroupTable& g, const AntiNbhdSpec& spec, long long D);

// ---------------------------------------------------------------------------
// Almost-orthogonality
// ---------------------------------------------------------------------------

// For unit vectors u^1..u^m with |<u^i, u^j>| <= 1/m^2 off the diagonal and a
// unit v:  sum_i <v, u^i>^2 <= 2.
BoundCheck almost_orthogonal_bound(const RepVector& v, const std::vector<RepVector>& u_list);

// Given k unit vectors v_1..v_k and k families of m unit vectors each (with
// the pairwise condition above holding inside each family), returns the
// smallest zero-based index i with |<v_l, u_l[i]>| <= sqrt(2k/m) for every l.
// Existence is guaranteed; NotFound signals a defect.
int select_near_orthogonal_index(const std::vector<RepVector>& v_list,
                                 const std::vector<std::vector<RepVector>>& u_lists);

// ---------------------------------------------------------------------------
// Syndeticity certificates
// ---------------------------------------------------------------------------

enum class CoverMode { greedy, exact };

inline const char* cover_mode_name(CoverMode m) {
    return m == CoverMode::greedy ? "greedy" : "exact";
}

struct SyndeticityCertificate {
    long long K = 0;              // number of translates used
    std::vector<int> translators; // h_1..h_K, left translates h*B
    bool coverage = false;        // exact bitset union equals G
    long long lower_bound = 0;    // ceil(n / |B|)
    CoverMode method = CoverMode::greedy;
};

// Greedy: repeatedly add the translate covering the most new elements (ties:
// smallest element index).  Exact: smallest K <= max_K by depth-first search
// with pruning.  When no cover within max_K exists the certificate comes back
// with coverage = false (partial translator list for greedy).
SyndeticityCertificate syndetic_cover(const GroupTable& g, const SubsetG& B,
                                      CoverMode mode, long long max_K = 64);

// Validate a certificate by recomputing the union of its translates.
bool certificate_valid(const GroupTable& g, const SubsetG& B,
                       const SyndeticityCertificate& cert);

// ---------------------------------------------------------------------------
// Randomized witness for covering an anti-neighbourhood intersection
// ---------------------------------------------------------------------------

struct BasicSyndeticWitness {
    bool found = false;
    int attempts = 0;
    std::vector<int> h;     // K translators when found
    long long K = 0;
    double eta = 0.0;       // the specs' common eps
    SubsetG A;              // intersection of the anti-neighbourhoods
    bool coverage = false;  // G == {h_1..h_K} * A, checked exactly
    double formula_K = 0.0; // ceil(2k/eta^2 + 1)
    double d_required = 0.0; // K^6 k + 1
    bool hypothesis_met = false;
    long long D = 0;
    std::vector<std::string> notes;
    std::uint64_t seed = 0;
};

// Samples K-tuples h_1..h_K i.i.d. until every pair i != j and every spec l
// satisfies |<pi_l^{h_i} u_l, pi_l^{h_j} u_l>  - <P u_l, P u_l>| < 1/K^2, then
// verifies coverage of the anti-neighbourhood intersection by those translates.
// No-witness outcomes are reported in the result, not thrown.
BasicSyndeticWitness basic_syndetic_witness(const GroupTable& g,
                                            const std::vector<AntiNbhdSpec>& specs,
                                            long long K, long long D,
                                            std::uint64_t seed = 42,
                                            int max_attempts = 1000);
BasicSyndeticWitness basic_syndetic_witness(const GroupTable& g,
                                            const std::vector<AntiNbhdSpec>& specs,
                                            long long K, std::uint64_t seed = 42,
                                            int max_attempts = 1000);

// ---------------------------------------------------------------------------
// Feasibility caps for the staged runs
// ---------------------------------------------------------------------------

struct PipelineCaps {
    double eta_floor = 0.05; // smallest tolerance actually used
    long long k_cap = 6;     // largest witness tuple sampled
    long long K_cap = 64;    // largest cover size attempted
    int max_attempts = 200;  // resampling budget per witness search
    int max_pairs = 2048;    // largest anti-neighbourhood family built
};

// ---------------------------------------------------------------------------
// Witness tuple taming the random parts of two triples
// ---------------------------------------------------------------------------

struct AuxPair {
    int i = 0, j = 0; // 0-based tuple indices, i < j
    FunctionGG F2;    // (x,y) -> f2(h_i x, y) f2(h_j x, y)
    FunctionGG F3;    // (x,y) -> f3(h_i x, h_i y) f3(h_j x, h_j y)
};

struct PipelineWitness {
    long long k = 0;
    double eps = 0.0;
    double eta = 0.0;
    bool found = false;
    int attempts = 0;
    std::vector<int> h;
    BoundCheck pre2, pre3;   // residual-norm preconditions on f2_2 and f3_3
    long long D = 0;
    double d_required = 0.0; // 4 k^4 / eta^4
    bool hypothesis_met = false;
    std::vector<AuxPair> aux2, aux3; // auxiliary products for the two triples
    SubsetG E;               // intersection of the pair anti-neighbourhoods
    SubsetG C2, C3;          // small-triple-form shift sets
    bool containment = false; // E included in {h_i^{-1}} * (C2 cap C3), exact
    bool containment_observational = false;
    std::vector<std::string> notes;
    std::uint64_t seed = 0;
};

// Given two triples (f2_1, f2_2, f2_3) and (f3_1, f3_2, f3_3) of [-1,1]-valued
// functions whose middle/last entries have small residual norms, samples a
// tuple h_1..h_k making every paired conditional-expectation norm small, then
// builds the auxiliary products, the anti-neighbourhood intersection E, and
// checks E subset of {h_1^{-1},..,h_k^{-1}} * (C2 cap C3) exactly, where C_l
// collects the shifts with |averaged triple form| < eps.  Throws
// NoWitnessTuple when the sampling budget is exhausted.
PipelineWitness kill_random_f2_pipeline(const GroupTable& g, const FunctionGG& f2_1,
                                        const FunctionGG& f2_2, const FunctionGG& f2_3,
                                        const FunctionGG& f3_1, const FunctionGG& f3_2,
                                        const FunctionGG& f3_3, double eps, long long D,
                                        const PipelineCaps& caps = {},
                                        std::uint64_t seed = 42);
PipelineWitness kill_random_f2_pipeline(const GroupTable& g, const FunctionGG& f2_1,
                                        const FunctionGG& f2_2, const FunctionGG& f2_3,
                                        const FunctionGG& f3_1, const FunctionGG& f3_2,
                                        const FunctionGG& f3_3, double eps,
                                        const PipelineCaps& caps = {},
                                        std::uint64_t seed = 42);

// ---------------------------------------------------------------------------
// The staged syndeticity run
// ---------------------------------------------------------------------------

struct TheoremDReport {
    double eps = 0.0;
    long long D = 0;
    Rational delta;

    // Stage one: tame the random parts in the second and third positions.
    long long k = 0;
    double eta = 0.0;
    DecompositionGG d2, d3;
    long long M2 = 0, M3 = 0;
    PipelineWitness witness;
    SubsetG C1, C2, C3, C; // C = C1 cap C2 cap C3

    // Stage two: the fine first-position decomposition.
    double eta_prime = 0.0;
    DecompositionGG d1;
    bool hyp_D_partitions = false; // D >= 16 M1^2 M2^2 M3^2 / eps^2
    double hyp_D_partitions_rhs = 0.0;

    // Stage three: product anti-neighbourhoods trapping the first position.
    SubsetG E_prime;
    int pairs_used = 0;
    bool pairs_capped = false;

    // Stage four: pulled-back intersections and the covering certificate.
    SubsetG E_dprime; // {g : h_i g in E_prime for all i}
    double K0 = 0.0;
    double d_required_cover = 0.0;
    SyndeticityCertificate cert; // greedy cover of C
    SubsetG B;
    Rational measure_C, measure_B;

    std::vector<BoundCheck> checks;
    std::vector<std::string> cap_events;
    bool all_nonvacuous_pass = true;
    std::uint64_t seed = 0;
};

// Runs the four stages with the proof's constants, capped per `caps` (every
// cap event recorded): decompose the indicator in the coordinate frames, find
// the witness tuple, intersect the anti-neighbourhood families, verify the
// containments exactly, and produce a covering certificate for the shift set
// C together with the popular-difference set B.
TheoremDReport theorem_D_pipeline(const GroupTable& g, const SubsetGG& E, double eps,
                                  long long D, const PipelineCaps& caps = {},
                                  const RegularityCaps& reg_caps = {},
                                  std::uint64_t seed = 42);
TheoremDReport theorem_D_pipeline(const GroupTable& g, const SubsetGG& E, double eps,
                                  const PipelineCaps& caps = {},
                                  const RegularityCaps& reg_caps = {},
                                  std::uint64_t seed = 42);

} // namespace qrg
