#pragma once

#include <span>
#include <vector>

#include "topotrace/grid.hpp"

namespace topotrace {

/// A location on a patch border together with the oracle's confidence that
/// it is connected to the patch center.
struct BorderDetection {
    PixelCoord location;
    double confidence = 0.0;

    friend bool operator==(const BorderDetection&, const BorderDetection&) = default;
};

/// Gaussian heatmap codec parameters.
struct HeatmapParams {
    double sigma = 2.0;
    int min_separation = 3;
    double threshold = 0.5;

    void validate() const;
};

/// Thins a mask to a one-pixel-wide, 8-connected skeleton.
///
/// Zhang–Suen candidate marking (with the Lü–Wang neighbour-count bound)
/// proposes deletions; each candidate is removed only if it is a simple
/// point, so the number of 8-connected components never changes. Line ends
/// are kept, and a final pass drops staircase corners. Neighbourhoods
/// replicate the image edge, so a structure running off the image keeps its
/// pixels up to the border. The result is a fixed point:
/// skeletonize(skeletonize(m)) == skeletonize(m).
BinaryMask skeletonize(const BinaryMask& mask);

/// value(p) = max over locations L of exp(-|p - L|^2 / (2 sigma^2)).
/// Peaks combine by max, so the map stays inside [0, 1].
ProbabilityMap render_heatmap(std::span<const PixelCoord> locations, double sigma, int width, int height);

/// Decodes a heatmap into discrete detections.
///
/// Candidates are non-zero local maxima (>= all 8 neighbours) with
/// value >= threshold. They are taken greedily by descending value (ties in
/// row-major order); any candidate within Chebyshev distance min_separation
/// of an accepted peak is suppressed.
std::vector<BorderDetection> extract_peaks(const ProbabilityMap& heatmap, double threshold, int min_separation);

/// Pixels of the Bresenham line from a to b, inclusive, starting at a.
/// The pixel set does not depend on the argument order.
Polyline bresenham_line(PixelCoord a, PixelCoord b);

/// Sets every pixel of the Bresenham line a-b. Throws InvalidArgument if
/// either endpoint is outside the mask.
void rasterize_segment(PixelCoord a, PixelCoord b, BinaryMask& mask);

/// Foreground where probability >= tau.
BinaryMask threshold(const ProbabilityMap& map, double tau);

/// 8-connected component labels (0 = background, 1..n in row-major order of
/// first pixel). `count` receives n.
Grid<int> label_components(const BinaryMask& mask, int* count = nullptr);

int count_components(const BinaryMask& mask);

/// True if removing `p` from `mask` preserves both 8-connectivity of the
/// foreground and 4-connectivity of the background in its neighbourhood.
bool is_simple_point(const BinaryMask& mask, PixelCoord p);

ProbabilityMap to_probability(const BinaryMask& mask);

}  // namespace topotrace
