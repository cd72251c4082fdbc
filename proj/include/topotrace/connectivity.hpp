#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "topotrace/raster.hpp"

namespace topotrace {

/// Patch geometry shared by all oracles.
struct OracleConfig {
    int k = 33;                  ///< patch side (odd)
    int s = 29;                  ///< border-square side (odd, 3 <= s < k)
    double tau_occupancy = 0.5;  ///< foreground threshold for the probability-map oracle

    int patch_half() const { return (k - 1) / 2; }
    int square_half() const { return (s - 1) / 2; }
    void validate() const;
};

/// Thrown by patch_ground_truth when no skeleton pixel lies within
/// Chebyshev distance 2 of the requested center.
class OffStructure : public Error {
public:
    OffStructure() : Error("center off structure") {}
};

/// Predicts which points of the border square around a center are connected
/// to the structure under that center. The image context is bound at
/// construction; implementations must be safe to call concurrently.
class ConnectivityOracle {
public:
    virtual ~ConnectivityOracle() = default;
    virtual std::vector<BorderDetection> predict(PixelCoord center) const = 0;
    virtual const OracleConfig& config() const = 0;
};

/// Border locations of a ground-truth patch.
///
/// The skeleton is restricted to the k x k patch; the center snaps to the
/// closest skeleton pixel within Chebyshev radius 2 (ties row-major); the
/// 8-connected component through that pixel is intersected with the
/// perimeter of the s x s square (both squares clipped to the image, so the
/// image edge acts as perimeter). The center itself is never returned.
/// Result is in row-major order. Throws OffStructure.
std::vector<PixelCoord> patch_ground_truth(const BinaryMask& gt_skeleton, PixelCoord center, const OracleConfig& cfg);

/// patch_ground_truth with confidence 1.0 per location; [] when off structure.
std::vector<BorderDetection> oracle_ground_truth(const BinaryMask& gt_skeleton, PixelCoord center,
                                                 const OracleConfig& cfg);

/// Thresholds the map at tau_occupancy, flood-fills from the foreground
/// pixel nearest to center (radius 2) inside the patch and intersects with
/// the square perimeter. Confidence is the map value at each location.
std::vector<BorderDetection> oracle_probmap(const ProbabilityMap& probmap, PixelCoord center, const OracleConfig& cfg);

class GroundTruthOracle final : public ConnectivityOracle {
public:
    GroundTruthOracle(BinaryMask skeleton, OracleConfig cfg);
    std::vector<BorderDetection> predict(PixelCoord center) const override;
    const OracleConfig& config() const override { return cfg_; }

private:
    BinaryMask skeleton_;
    OracleConfig cfg_;
};

class ProbabilityMapOracle final : public ConnectivityOracle {
public:
    ProbabilityMapOracle(ProbabilityMap probmap, OracleConfig cfg);
    std::vector<BorderDetection> predict(PixelCoord center) const override;
    const OracleConfig& config() const override { return cfg_; }

private:
    ProbabilityMap probmap_;
    OracleConfig cfg_;
};

/// One training example: a k x k patch heatmap with Gaussian peaks at the
/// patch's ground-truth border locations (patch-local coordinates).
struct PatchSample {
    PixelCoord center;
    std::vector<PixelCoord> locations;  ///< absolute image coordinates
    Window patch;                       ///< clipped k x k window
    ProbabilityMap heatmap;             ///< k x k, patch-local
};

PatchSample make_patch_sample(const BinaryMask& gt_skeleton, PixelCoord center, const OracleConfig& cfg,
                              double sigma);

/// `count` distinct skeleton pixels drawn with a seeded SplitMix64 stream
/// (partial Fisher–Yates over the row-major pixel list). Returns fewer when
/// the skeleton has fewer pixels.
std::vector<PixelCoord> sample_patch_centers(const BinaryMask& gt_skeleton, std::size_t count, std::uint64_t seed);

}  // namespace topotrace
