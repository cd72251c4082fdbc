#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topotrace/graph.hpp"

namespace topotrace {

struct EvalConfig {
    double d_match = 2.0;             ///< boundary match tolerance, px
    double connectivity_ratio = 0.8;  ///< a segment passes when l_gt / l_pred exceeds this
    double d_near = 10.0;             ///< max distance from a segment end to the prediction
    bool symmetric_ratio = false;     ///< test min(l_gt, l_pred) / max(...) instead
    bool parallel = true;             ///< per-segment checks on the OpenMP pool

    void validate() const;
};

struct SegmentOutcome {
    PixelCoord start;
    PixelCoord end;
    double gt_length = 0.0;
    std::optional<double> pred_length;
    double ratio = 0.0;
    bool ok = false;
    std::string reason;  ///< empty on success
};

struct EvalResult {
    double precision = 0.0;
    double recall = 0.0;
    double connectivity = 0.0;
    double f_r = 0.0;
    double f_c = 0.0;
    int segments_total = 0;
    int segments_ok = 0;
    std::vector<SegmentOutcome> segments;
};

/// Harmonic mean 2ab / (a + b); 0 when a + b = 0.
double f_measure(double a, double b);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

/// Greedy one-to-one matching of true pixels within d_match, closest pairs
/// first (ties: pred pixel, then gt pixel, row-major). Empty sides: both
/// empty gives (1, 1), empty pred (1, 0), empty gt (0, 1).
PrecisionRecall boundary_pr(const BinaryMask& pred, const BinaryMask& gt, double d_match);

struct ConnectivityResult {
    double connectivity = 0.0;
    int segments_ok = 0;
    std::vector<SegmentOutcome> segments;
};

/// Fraction of gt segments reproduced without a break in pred.
///
/// Each segment end is mapped to its nearest pred point; the segment fails
/// if either lies farther than d_near, the two are disconnected, or the pred
/// path has zero length. Otherwise it passes iff l_gt / l_pred exceeds the
/// ratio. A closed segment is split at its half-length point and both halves
/// must pass, the second pred path avoiding the interior of the first.
ConnectivityResult connectivity(const NetworkGraph& pred, const NetworkGraph& gt, const EvalConfig& cfg);

/// Rasterizes both graphs and computes P, R, C, F^R and F^C.
EvalResult evaluate(const NetworkGraph& pred, const NetworkGraph& gt, const EvalConfig& cfg);

}  // namespace topotrace
