#include "topotrace/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace topotrace::kernels {

namespace {

// Neighbour order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr int kRingRow[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kRingCol[8] = {0, 1, 1, 1, 0, -1, -1, -1};

std::uint8_t clamped(const BinaryMask& m, int row, int col) {
    row = std::clamp(row, 0, m.height() - 1);
    col = std::clamp(col, 0, m.width() - 1);
    return m(row, col) != 0;
}

bool is_candidate(const BinaryMask& m, int row, int col, int pass) {
    if (!m(row, col)) return false;
    int p[8];
    int count = 0;
    for (int i = 0; i < 8; ++i) {
        p[i] = clamped(m, row + kRingRow[i], col + kRingCol[i]);
        count += p[i];
    }
    // Lü–Wang lower bound of 3 keeps two-pixel diagonals from collapsing.
    if (count < 3 || count > 6) return false;
    int transitions = 0;
    for (int i = 0; i < 8; ++i) transitions += (p[i] == 0 && p[(i + 1) % 8] == 1);
    if (transitions != 1) return false;
    const int n = p[0], e = p[2], s = p[4], w = p[6];
    if (pass == 0) return n * e * s == 0 && e * s * w == 0;
    return n * e * w == 0 && n * s * w == 0;
}

double heat_at(std::span<const PixelCoord> locations, double inv_two_sigma_sq, int row, int col) {
    double best = 0.0;
    for (const auto& loc : locations) {
        const double dr = row - loc.row;
        const double dc = col - loc.col;
        best = std::max(best, std::exp(-(dr * dr + dc * dc) * inv_two_sigma_sq));
    }
    return std::min(1.0, best);
}

}  // namespace

// ---------------------------------------------------------------- parallel

void mark_thinning_candidates(const BinaryMask& mask, int pass, BinaryMask& marks) {
    if (!marks.same_shape(mask)) marks = BinaryMask(mask.width(), mask.height());
    const int h = mask.height();
    const int w = mask.width();
#pragma omp parallel for schedule(static)
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) marks(r, c) = is_candidate(mask, r, c, pass);
}

ProbabilityMap render_heatmap(std::span<const PixelCoord> locations, double sigma, int width, int height) {
    ProbabilityMap out(width, height, 0.0);
    if (locations.empty()) return out;
    const double inv = 1.0 / (2.0 * sigma * sigma);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) out(r, c) = heat_at(locations, inv, r, c);
    return out;
}

ProbabilityMap line_box_blur(const BinaryMask& mask, int radius) {
    const int h = mask.height();
    const int w = mask.width();
    // Separable running sums; counts are integers so the result matches the
    // direct window sum exactly.
    Grid<int> horizontal(w, h, 0);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < h; ++r) {
        int sum = 0;
        for (int c = 0; c <= std::min(radius, w - 1); ++c) sum += mask(r, c) != 0;
        for (int c = 0; c < w; ++c) {
            horizontal(r, c) = sum;
            const int add = c + radius + 1;
            const int drop = c - radius;
            if (add < w) sum += mask(r, add) != 0;
            if (drop >= 0) sum -= mask(r, drop) != 0;
        }
    }
    ProbabilityMap out(w, h, 0.0);
    const double norm = 1.0 / (2 * radius + 1);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < w; ++c) {
        int sum = 0;
        for (int r = 0; r <= std::min(radius, h - 1); ++r) sum += horizontal(r, c);
        for (int r = 0; r < h; ++r) {
            out(r, c) = std::min(1.0, sum * norm);
            const int add = r + radius + 1;
            const int drop = r - radius;
            if (add < h) sum += horizontal(add, c);
            if (drop >= 0) sum -= horizontal(drop, c);
        }
    }
    return out;
}

BinaryMask threshold(const ProbabilityMap& map, double tau) {
    BinaryMask out(map.width(), map.height());
    const auto in = map.values();
    auto dst = out.values();
    const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) dst[i] = in[i] >= tau;
    return out;
}

std::vector<MatchPair> match_candidates(const BinaryMask& pred, const BinaryMask& gt, double d_match) {
    const int h = pred.height();
    const int w = pred.width();
    const int reach = static_cast<int>(std::floor(d_match));
    const double limit = d_match * d_match;
    std::vector<std::vector<MatchPair>> rows(static_cast<std::size_t>(h));
#pragma omp parallel for schedule(dynamic, 8)
    for (int r = 0; r < h; ++r) {
        auto& bucket = rows[static_cast<std::size_t>(r)];
        for (int c = 0; c < w; ++c) {
            if (!pred(r, c)) continue;
            const std::size_t pi = pred.index(r, c);
            for (int gr = std::max(0, r - reach); gr <= std::min(h - 1, r + reach); ++gr)
                for (int gc = std::max(0, c - reach); gc <= std::min(w - 1, c + reach); ++gc) {
                    if (!gt(gr, gc)) continue;
                    const long d2 = squared_distance({r, c}, {gr, gc});
                    if (static_cast<double>(d2) <= limit) bucket.push_back({d2, pi, gt.index(gr, gc)});
                }
        }
    }
    std::vector<MatchPair> out;
    for (auto& bucket : rows) out.insert(out.end(), bucket.begin(), bucket.end());
    return out;
}

// ------------------------------------------------------------------ serial

namespace serial {

void mark_thinning_candidates(const BinaryMask& mask, int pass, BinaryMask& marks) {
    if (!marks.same_shape(mask)) marks = BinaryMask(mask.width(), mask.height());
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c) marks(r, c) = is_candidate(mask, r, c, pass);
}

ProbabilityMap render_heatmap(std::span<const PixelCoord> locations, double sigma, int width, int height) {
    ProbabilityMap out(width, height, 0.0);
    if (locations.empty()) return out;
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) out(r, c) = heat_at(locations, inv, r, c);
    return out;
}

ProbabilityMap line_box_blur(const BinaryMask& mask, int radius) {
    ProbabilityMap out(mask.width(), mask.height(), 0.0);
    const double norm = 1.0 / (2 * radius + 1);
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c) {
            int sum = 0;
            for (int dr = -radius; dr <= radius; ++dr)
                for (int dc = -radius; dc <= radius; ++dc) sum += mask.get_or(r + dr, c + dc, 0) != 0;
            out(r, c) = std::min(1.0, sum * norm);
        }
    return out;
}

BinaryMask threshold(const ProbabilityMap& map, double tau) {
    BinaryMask out(map.width(), map.height());
    for (std::size_t i = 0; i < map.size(); ++i) out.values()[i] = map.values()[i] >= tau;
    return out;
}

std::vector<MatchPair> match_candidates(const BinaryMask& pred, const BinaryMask& gt, double d_match) {
    const auto gt_pixels = true_pixels(gt);
    const double limit = d_match * d_match;
    std::vector<MatchPair> out;
    for (const auto& p : true_pixels(pred))
        for (const auto& g : gt_pixels) {
            const long d2 = squared_distance(p, g);
            if (static_cast<double>(d2) <= limit) out.push_back({d2, pred.index(p.row, p.col), gt.index(g.row, g.col)});
        }
    return out;
}

}  // namespace serial

}  // namespace topotrace::kernels
