#pragma once

// Box (cut) norms on G x G in three coordinate frames.
//
// Coordinates: 1 is x, 2 is y, 12 is the combination x^{-1}y.  Each frame
// pairs f against a product of two bounded test functions in its coordinates:
//   (1,2):  sup | avg f(x,y) s(x) t(y) |
//   (1,12): sup | avg f(x,y) s(y) t(x^{-1}y) |
//   (12,2): sup | avg f(x,y) s(x^{-1}y) t(x) |
// over |s|,|t| <= 1.  By bilinearity the sup is attained at +-1 vectors.
//
// frame_transform rewrites f into coordinates (a,b) where the pairing becomes
// the plain product form avg F(a,b) s(a) t(b):
//   (1,12): (a,b) = (y, x^{-1}y), so F(a,b) = f(a b^{-1}, a)
//   (12,2): (a,b) = (x^{-1}y, x), so F(a,b) = f(b, b a)
// Both substitutions are bijections of G x G, so the transform is
// measure-preserving and the norms agree exactly.
//
// exact mode enumerates sign vectors with the first entry pinned to +1 (a
// global double flip leaves the pairing unchanged) and reads the optimal
// second vector off the sign of the marginal; heuristic mode runs alternating
// sign ascent from seeded restarts and certifies a LOWER bound only.

#include <cstdint>
#include <string>
#include <vector>

#include "qrg/gg.hpp"
#include "qrg/group.hpp"

namespace qrg {

enum class BoxFrame { c1_2, c1_12, c12_2 };

inline const char* frame_name(BoxFrame f) {
    switch (f) {
        case BoxFrame::c1_2: return "(1,2)";
        case BoxFrame::c1_12: return "(1,12)";
        case BoxFrame::c12_2: return "(12,2)";
    }
    return "?";
}

enum class NormMode { exact, heuristic };

struct BoxNormCaps {
    int exact_cap = 20;       // largest n for 2^{n-1} enumeration
    int restarts = 32;        // heuristic restarts
    int max_alternations = 200;
};

struct BoxNormResult {
    double value = 0.0;
    bool exact = false;
    BoxFrame frame = BoxFrame::c1_2;
    // Witness sign vectors over G, in the frame's own coordinates: witness_a
    // tests the first frame coordinate, witness_b the second.
    std::vector<double> witness_a, witness_b;
    int restarts_used = 0;
    std::uint64_t seed = 0;
};

FunctionGG frame_transform(const GroupTable& g, const FunctionGG& f, BoxFrame frame);
FunctionGG inverse_frame_transform(const GroupTable& g, const FunctionGG& f,
                                   BoxFrame frame);

// The frame's bilinear pairing of f with explicit test vectors (length n).
double frame_pairing(const GroupTable& g, const FunctionGG& f, BoxFrame frame,
                     const std::vector<double>& a_signs,
                     const std::vector<double>& b_signs);

// Product-form norm of a raw n x n matrix (already in pairing coordinates).
BoxNormResult product_box_norm(const std::vector<double>& m, int n, NormMode mode,
                               std::uint64_t seed = 42, const BoxNormCaps& caps = {});

BoxNormResult box_norm(const GroupTable& g, const FunctionGG& f, BoxFrame frame,
                       NormMode mode, std::uint64_t seed = 42,
                       const BoxNormCaps& caps = {});

} // namespace qrg
