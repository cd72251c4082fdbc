#pragma once

// Data-parallel pixel kernels. Every kernel has an OpenMP version (in
// topotrace::kernels) and a plain serial reference (in
// topotrace::kernels::serial). The two produce identical output; the serial
// versions exist for tests and the benchmark.

#include <cstdint>
#include <span>
#include <vector>

#include "topotrace/grid.hpp"

namespace topotrace::kernels {

/// Candidate pixel pair for boundary matching. Indices are row-major pixel
/// indices, so comparing them compares pixels in row-major order.
struct MatchPair {
    long squared_distance = 0;
    std::size_t pred_index = 0;
    std::size_t gt_index = 0;

    friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

/// Marks Zhang–Suen deletion candidates for sub-iteration `pass` (0 or 1).
/// Neighbours outside the image take the value of the nearest edge pixel.
void mark_thinning_candidates(const BinaryMask& mask, int pass, BinaryMask& marks);

ProbabilityMap render_heatmap(std::span<const PixelCoord> locations, double sigma, int width, int height);

/// Box sum of the mask over a (2r+1)^2 window clipped to the image, divided
/// by 2r+1 and capped at 1: a straight one-pixel line keeps probability 1
/// along its centre and spreads r pixels to either side.
ProbabilityMap line_box_blur(const BinaryMask& mask, int radius);

BinaryMask threshold(const ProbabilityMap& map, double tau);

/// Every (pred, gt) pair of true pixels within Euclidean distance d_match,
/// ordered by pred pixel then gt pixel.
std::vector<MatchPair> match_candidates(const BinaryMask& pred, const BinaryMask& gt, double d_match);

namespace serial {

void mark_thinning_candidates(const BinaryMask& mask, int pass, BinaryMask& marks);
ProbabilityMap render_heatmap(std::span<const PixelCoord> locations, double sigma, int width, int height);
ProbabilityMap line_box_blur(const BinaryMask& mask, int radius);
BinaryMask threshold(const ProbabilityMap& map, double tau);
std::vector<MatchPair> match_candidates(const BinaryMask& pred, const BinaryMask& gt, double d_match);

}  // namespace serial

}  // namespace topotrace::kernels
