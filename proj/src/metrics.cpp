#include "topotrace/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "topotrace/kernels.hpp"

namespace topotrace {

namespace {

struct SegmentCheck {
    std::optional<double> pred_length;
    double ratio = 0.0;
    bool ok = false;
    std::string reason;
    Polyline pred_points;
};

bool ratio_passes(double gt_length, double pred_length, const EvalConfig& cfg, double& ratio) {
    ratio = gt_length / pred_length;
    const double tested = cfg.symmetric_ratio ? std::min(ratio, 1.0 / ratio) : ratio;
    return tested > cfg.connectivity_ratio;
}

SegmentCheck check_piece(const GraphIndex& pred, PixelCoord a, PixelCoord b, double gt_length, const EvalConfig& cfg,
                         const std::vector<PixelCoord>& blocked) {
    SegmentCheck out;
    const auto [na, da] = pred.nearest(a);
    const auto [nb, db] = pred.nearest(b);
    if (da > cfg.d_near || db > cfg.d_near) {
        out.reason = "far from prediction";
        return out;
    }
    const auto path = pred.shortest_path(na, nb, blocked);
    if (!path) {
        out.reason = "disconnected";
        return out;
    }
    out.pred_length = path->length;
    out.pred_points = path->points;
    if (!(path->length > 0.0)) {
        out.reason = "zero-length prediction";
        return out;
    }
    out.ok = ratio_passes(gt_length, path->length, cfg, out.ratio);
    if (!out.ok) out.reason = "length ratio";
    return out;
}

SegmentOutcome check_segment(const GraphIndex& pred, const Segment& seg, const EvalConfig& cfg) {
    SegmentOutcome out{seg.start, seg.end, seg.length, std::nullopt, 0.0, false, {}};
    if (pred.empty()) {
        out.reason = "empty prediction";
        return out;
    }
    if (!seg.closed()) {
        const auto check = check_piece(pred, seg.start, seg.end, seg.length, cfg, {});
        out.pred_length = check.pred_length;
        out.ratio = check.ratio;
        out.ok = check.ok;
        out.reason = check.reason;
        return out;
    }

    // Split a loop at the point where half its length has been walked.
    std::size_t mid = 1;
    double walked = 0.0;
    for (; mid + 1 < seg.path.size(); ++mid) {
        walked += euclidean(seg.path[mid - 1], seg.path[mid]);
        if (walked >= seg.length / 2.0) break;
    }
    const double first_len = walked;
    const double second_len = seg.length - walked;
    const auto first = check_piece(pred, seg.start, seg.path[mid], first_len, cfg, {});
    if (!first.ok) {
        out.pred_length = first.pred_length;
        out.ratio = first.ratio;
        out.reason = first.reason;
        return out;
    }
    std::vector<PixelCoord> interior;
    if (first.pred_points.size() > 2) interior.assign(first.pred_points.begin() + 1, first.pred_points.end() - 1);
    const auto second = check_piece(pred, seg.path[mid], seg.end, second_len, cfg, interior);
    out.pred_length = first.pred_length.value_or(0.0) + second.pred_length.value_or(0.0);
    out.ratio = seg.length / *out.pred_length;
    out.ok = second.ok;
    out.reason = second.reason;
    if (!second.pred_length) out.pred_length.reset();
    return out;
}

}  // namespace

void EvalConfig::validate() const {
    if (!(d_match >= 0.0)) throw InvalidArgument("d_match must be >= 0");
    if (!(connectivity_ratio > 0.0 && connectivity_ratio <= 1.0))
        throw InvalidArgument("connectivity_ratio must be in (0,1]");
    if (!(d_near > 0.0)) throw InvalidArgument("d_near must be > 0");
}

double f_measure(double a, double b) {
    const double sum = a + b;
    return sum == 0.0 ? 0.0 : 2.0 * a * b / sum;
}

PrecisionRecall boundary_pr(const BinaryMask& pred, const BinaryMask& gt, double d_match) {
    if (!pred.same_shape(gt)) throw InvalidArgument("boundary_pr: mask dimensions differ");
    if (!(d_match >= 0.0)) throw InvalidArgument("d_match must be >= 0");
    const std::size_t n_pred = count_true(pred);
    const std::size_t n_gt = count_true(gt);
    if (n_pred == 0) return {1.0, n_gt == 0 ? 1.0 : 0.0};
    if (n_gt == 0) return {0.0, 1.0};

    auto pairs = kernels::match_candidates(pred, gt, d_match);
    std::sort(pairs.begin(), pairs.end(), [](const kernels::MatchPair& a, const kernels::MatchPair& b) {
        if (a.squared_distance != b.squared_distance) return a.squared_distance < b.squared_distance;
        if (a.pred_index != b.pred_index) return a.pred_index < b.pred_index;
        return a.gt_index < b.gt_index;
    });
    std::vector<std::uint8_t> pred_used(pred.size(), 0), gt_used(gt.size(), 0);
    std::size_t matched = 0;
    for (const auto& pair : pairs) {
        if (pred_used[pair.pred_index] || gt_used[pair.gt_index]) continue;
        pred_used[pair.pred_index] = gt_used[pair.gt_index] = 1;
        ++matched;
    }
    return {static_cast<double>(matched) / static_cast<double>(n_pred),
            static_cast<double>(matched) / static_cast<double>(n_gt)};
}

ConnectivityResult connectivity(const NetworkGraph& pred, const NetworkGraph& gt, const EvalConfig& cfg) {
    cfg.validate();
    const auto segments = extract_segments(gt);
    ConnectivityResult out;
    if (segments.empty()) {
        out.connectivity = pred.empty() ? 1.0 : 0.0;
        return out;
    }
    const GraphIndex index(pred);
    out.segments.resize(segments.size());
    const auto n = static_cast<std::ptrdiff_t>(segments.size());
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out.segments[static_cast<std::size_t>(i)] = check_segment(index, segments[static_cast<std::size_t>(i)], cfg);
    for (const auto& s : out.segments) out.segments_ok += s.ok;
    out.connectivity = static_cast<double>(out.segments_ok) / static_cast<double>(segments.size());
    return out;
}

EvalResult evaluate(const NetworkGraph& pred, const NetworkGraph& gt, const EvalConfig& cfg) {
    cfg.validate();
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw InvalidArgument("evaluate: graph dimensions differ (" + std::to_string(pred.width()) + "x" +
                              std::to_string(pred.height()) + " vs " + std::to_string(gt.width()) + "x" +
                              std::to_string(gt.height()) + ")");
    const auto pr = boundary_pr(graph_to_raster(pred), graph_to_raster(gt), cfg.d_match);
    auto conn = connectivity(pred, gt, cfg);

    EvalResult out;
    out.precision = pr.precision;
    out.recall = pr.recall;
    out.connectivity = conn.connectivity;
    out.f_r = f_measure(out.precision, out.recall);
    out.f_c = f_measure(out.precision, out.connectivity);
    out.segments_total = static_cast<int>(conn.segments.size());
    out.segments_ok = conn.segments_ok;
    out.segments = std::move(conn.segments);
    return out;
}

}  // namespace topotrace
