#pragma once

#include <cstdint>

#include "topotrace/graph.hpp"

namespace topotrace {

struct CorruptionParams {
    int blur_radius = 0;
    double noise_amp = 0.0;
    int gap_count = 0;
    int gap_len = 7;
    int clutter_count = 0;
};

struct SynthParams {
    std::uint64_t seed = 1;
    int width = 256;
    int height = 256;
    int n_seeds = 2;           ///< arms leaving each component root
    double branch_prob = 0.1;  ///< chance per step that a walk spawns a branch
    int step_len = 8;
    int n_components = 1;
    int max_branches = 6;      ///< per component
    int max_branch_depth = 2;
    CorruptionParams corruption;

    void validate() const;
};

struct SynthScene {
    NetworkGraph graph;
    BinaryMask mask;
};

/// Grows n_components disjoint trees by seeded random walks.
///
/// Each component starts at a random root and sends n_seeds arms out at
/// evenly spaced headings. Walks turn by at most 20 degrees per step and run
/// until they reach the image border; a walk that would pass within 2 px of
/// its own structure, or ends shorter than step_len, is abandoned. A
/// component that keeps failing may let walks stop at the keep-out zone of
/// an earlier component instead. No branch spawns within step_len of the
/// border. Branches leave at 60 +- 15 degrees.
/// Components keep 2 * step_len px apart. Throws Error when a component
/// cannot be placed after bounded retries.
SynthScene generate_network(const SynthParams& params);

/// Emulates an imperfect segmentation: box blur, uniform noise, gaps carved
/// along the structure (values <= 0.1) and short off-structure strokes
/// (values >= 0.85), clamped to [0, 1].
ProbabilityMap corrupt(const BinaryMask& mask, const SynthParams& params);

}  // namespace topotrace
