#include "topotrace/connectivity.hpp"

#include <algorithm>
#include <optional>
#include <queue>

#include "topotrace/random.hpp"

namespace topotrace {

namespace {

constexpr int kSnapRadius = 2;

// Foreground pixel closest to center (Euclidean) within Chebyshev radius 2
// and inside the patch; ties row-major.
template <typename IsFg>
std::optional<PixelCoord> snap(const Window& patch, PixelCoord center, IsFg is_fg) {
    std::optional<PixelCoord> best;
    long best_d2 = 0;
    for (int r = center.row - kSnapRadius; r <= center.row + kSnapRadius; ++r)
        for (int c = center.col - kSnapRadius; c <= center.col + kSnapRadius; ++c) {
            const PixelCoord p{r, c};
            if (!patch.contains(p) || !is_fg(p)) continue;
            const long d2 = squared_distance(p, center);
            if (!best || d2 < best_d2) {
                best = p;
                best_d2 = d2;
            }
        }
    return best;
}

template <typename IsFg>
std::vector<PixelCoord> border_exits(int width, int height, PixelCoord center, const OracleConfig& cfg,
                                     PixelCoord seed, IsFg is_fg) {
    const Window patch = Window::around(center, cfg.patch_half(), width, height);
    const Window square = Window::around(center, cfg.square_half(), width, height);

    Grid<std::uint8_t> seen(patch.width(), patch.height(), 0);
    auto local = [&](PixelCoord p) { return PixelCoord{p.row - patch.row0, p.col - patch.col0}; };

    std::vector<PixelCoord> exits;
    std::queue<PixelCoord> frontier;
    seen[local(seed)] = 1;
    frontier.push(seed);
    while (!frontier.empty()) {
        const auto p = frontier.front();
        frontier.pop();
        if (p != center && square.on_perimeter(p)) exits.push_back(p);
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                const PixelCoord q{p.row + dr, p.col + dc};
                if (!patch.contains(q) || seen[local(q)] || !is_fg(q)) continue;
                seen[local(q)] = 1;
                frontier.push(q);
            }
    }
    std::sort(exits.begin(), exits.end());
    return exits;
}

void check_center(int width, int height, PixelCoord center) {
    if (center.row < 0 || center.col < 0 || center.row >= height || center.col >= width)
        throw InvalidArgument("center " + to_string(center) + " outside the image");
}

}  // namespace

void OracleConfig::validate() const {
    if (k < 3 || k % 2 == 0) throw InvalidArgument("k must be an odd integer >= 3");
    if (s < 3 || s % 2 == 0) throw InvalidArgument("s must be an odd integer >= 3");
    if (s >= k) throw InvalidArgument("s must be smaller than k");
    if (!(tau_occupancy >= 0.0 && tau_occupancy <= 1.0)) throw InvalidArgument("tau_occupancy must be in [0,1]");
}

std::vector<PixelCoord> patch_ground_truth(const BinaryMask& gt_skeleton, PixelCoord center, const OracleConfig& cfg) {
    cfg.validate();
    check_center(gt_skeleton.width(), gt_skeleton.height(), center);
    auto is_fg = [&](PixelCoord p) { return gt_skeleton[p] != 0; };
    const Window patch = Window::around(center, cfg.patch_half(), gt_skeleton.width(), gt_skeleton.height());
    const auto seed = snap(patch, center, is_fg);
    if (!seed) throw OffStructure();
    return border_exits(gt_skeleton.width(), gt_skeleton.height(), center, cfg, *seed, is_fg);
}

std::vector<BorderDetection> oracle_ground_truth(const BinaryMask& gt_skeleton, PixelCoord center,
                                                 const OracleConfig& cfg) {
    std::vector<BorderDetection> out;
    try {
        for (const auto& p : patch_ground_truth(gt_skeleton, center, cfg)) out.push_back({p, 1.0});
    } catch (const OffStructure&) {
        return {};
    }
    return out;
}

std::vector<BorderDetection> oracle_probmap(const ProbabilityMap& probmap, PixelCoord center, const OracleConfig& cfg) {
    cfg.validate();
    check_center(probmap.width(), probmap.height(), center);
    auto is_fg = [&](PixelCoord p) { return probmap[p] >= cfg.tau_occupancy; };
    const Window patch = Window::around(center, cfg.patch_half(), probmap.width(), probmap.height());
    const auto seed = snap(patch, center, is_fg);
    if (!seed) return {};
    std::vector<BorderDetection> out;
    for (const auto& p : border_exits(probmap.width(), probmap.height(), center, cfg, *seed, is_fg))
        out.push_back({p, std::clamp(probmap[p], 0.0, 1.0)});
    return out;
}

GroundTruthOracle::GroundTruthOracle(BinaryMask skeleton, OracleConfig cfg)
    : skeleton_(std::move(skeleton)), cfg_(cfg) {
    cfg_.validate();
}

std::vector<BorderDetection> GroundTruthOracle::predict(PixelCoord center) const {
    return oracle_ground_truth(skeleton_, center, cfg_);
}

ProbabilityMapOracle::ProbabilityMapOracle(ProbabilityMap probmap, OracleConfig cfg)
    : probmap_(std::move(probmap)), cfg_(cfg) {
    cfg_.validate();
}

std::vector<BorderDetection> ProbabilityMapOracle::predict(PixelCoord center) const {
    return oracle_probmap(probmap_, center, cfg_);
}

PatchSample make_patch_sample(const BinaryMask& gt_skeleton, PixelCoord center, const OracleConfig& cfg,
                              double sigma) {
    PatchSample sample;
    sample.center = center;
    sample.locations = patch_ground_truth(gt_skeleton, center, cfg);
    sample.patch = Window::around(center, cfg.patch_half(), gt_skeleton.width(), gt_skeleton.height());
    std::vector<PixelCoord> local;
    for (const auto& p : sample.locations) local.push_back({p.row - sample.patch.row0, p.col - sample.patch.col0});
    sample.heatmap = render_heatmap(local, sigma, sample.patch.width(), sample.patch.height());
    return sample;
}

std::vector<PixelCoord> sample_patch_centers(const BinaryMask& gt_skeleton, std::size_t count, std::uint64_t seed) {
    auto pixels = true_pixels(gt_skeleton);
    SplitMix64 rng(seed);
    const std::size_t n = std::min(count, pixels.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(pixels.size() - i));
        std::swap(pixels[i], pixels[j]);
    }
    pixels.resize(n);
    return pixels;
}

}  // namespace topotrace
