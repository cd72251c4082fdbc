#include "topotrace/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <queue>

#include "topotrace/kernels.hpp"

namespace topotrace {

namespace {

constexpr int kRingRow[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kRingCol[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// Simple-point lookup indexed by the 8-bit neighbourhood (bit i = ring
// position i, ordered N, NE, E, SE, S, SW, W, NW).
std::array<bool, 256> build_simple_table() {
    std::array<bool, 256> table{};
    for (int code = 0; code < 256; ++code) {
        auto set = [&](int i) { return (code >> i) & 1; };
        auto find = [](std::array<int, 8>& parent, int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        std::array<int, 8> fg{}, bg{};
        for (int i = 0; i < 8; ++i) fg[i] = bg[i] = i;
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) {
                const int dr = std::abs(kRingRow[i] - kRingRow[j]);
                const int dc = std::abs(kRingCol[i] - kRingCol[j]);
                if (set(i) && set(j) && std::max(dr, dc) == 1) fg[find(fg, i)] = find(fg, j);
                if (!set(i) && !set(j) && dr + dc == 1) bg[find(bg, i)] = find(bg, j);
            }
        int fg_roots = 0;
        for (int i = 0; i < 8; ++i) fg_roots += set(i) && find(fg, i) == i;
        int bg_root = -1;
        bool single_bg = true;
        bool any_bg = false;
        for (int i = 0; i < 8; i += 2) {  // 4-neighbours only
            if (set(i)) continue;
            any_bg = true;
            const int root = find(bg, i);
            if (bg_root >= 0 && root != bg_root) single_bg = false;
            bg_root = root;
        }
        table[code] = fg_roots == 1 && any_bg && single_bg;
    }
    return table;
}

const std::array<bool, 256>& simple_table() {
    static const std::array<bool, 256> table = build_simple_table();
    return table;
}

int ring_code(const BinaryMask& m, PixelCoord p) {
    int code = 0;
    for (int i = 0; i < 8; ++i)
        if (m.get_or(p.row + kRingRow[i], p.col + kRingCol[i], 0)) code |= 1 << i;
    return code;
}

int popcount8(int code) {
    int n = 0;
    for (; code; code &= code - 1) ++n;
    return n;
}

// Pixel with two perpendicular 4-neighbours set: redundant for 8-connectivity
// whenever it is also simple.
bool is_staircase_corner(int code) {
    const bool n = code & 1, e = code & 4, s = code & 16, w = code & 64;
    return (n && e) || (e && s) || (s && w) || (w && n);
}

}  // namespace

void HeatmapParams::validate() const {
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
    if (min_separation < 0) throw InvalidArgument("min_separation must be >= 0");
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidArgument("heatmap threshold must be in [0,1]");
}

bool is_simple_point(const BinaryMask& mask, PixelCoord p) {
    return simple_table()[static_cast<std::size_t>(ring_code(mask, p))];
}

BinaryMask skeletonize(const BinaryMask& mask) {
    BinaryMask m(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.size(); ++i) m.values()[i] = mask.values()[i] != 0;
    if (m.empty()) return m;

    const auto& simple = simple_table();
    BinaryMask marks;
    for (;;) {
        bool changed_any = false;

        for (;;) {
            bool changed = false;
            for (int pass = 0; pass < 2; ++pass) {
                kernels::mark_thinning_candidates(m, pass, marks);
                for (int r = 0; r < m.height(); ++r)
                    for (int c = 0; c < m.width(); ++c) {
                        if (!marks(r, c) || !m(r, c)) continue;
                        const int code = ring_code(m, {r, c});
                        if (popcount8(code) >= 2 && simple[static_cast<std::size_t>(code)]) {
                            m(r, c) = 0;
                            changed = true;
                        }
                    }
            }
            if (!changed) break;
            changed_any = true;
        }

        for (bool changed = true; changed;) {
            changed = false;
            for (int r = 0; r < m.height(); ++r)
                for (int c = 0; c < m.width(); ++c) {
                    if (!m(r, c)) continue;
                    const int code = ring_code(m, {r, c});
                    if (is_staircase_corner(code) && simple[static_cast<std::size_t>(code)]) {
                        m(r, c) = 0;
                        changed = changed_any = true;
                    }
                }
        }

        if (!changed_any) break;
    }
    return m;
}

ProbabilityMap render_heatmap(std::span<const PixelCoord> locations, double sigma, int width, int height) {
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
    ProbabilityMap probe(width, height);
    for (const auto& loc : locations)
        if (!probe.contains(loc)) throw InvalidArgument("heatmap location " + to_string(loc) + " out of bounds");
    return kernels::render_heatmap(locations, sigma, width, height);
}

std::vector<BorderDetection> extract_peaks(const ProbabilityMap& heatmap, double threshold, int min_separation) {
    std::vector<BorderDetection> candidates;
    for (int r = 0; r < heatmap.height(); ++r)
        for (int c = 0; c < heatmap.width(); ++c) {
            const double v = heatmap(r, c);
            if (v < threshold || v <= 0.0) continue;
            bool is_max = true;
            for (int i = 0; i < 8 && is_max; ++i) {
                const int rr = r + kRingRow[i];
                const int cc = c + kRingCol[i];
                if (heatmap.contains(rr, cc) && heatmap(rr, cc) > v) is_max = false;
            }
            if (is_max) candidates.push_back({{r, c}, v});
        }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const BorderDetection& a, const BorderDetection& b) { return a.confidence > b.confidence; });
    std::vector<BorderDetection> peaks;
    for (const auto& cand : candidates) {
        const bool suppressed = std::any_of(peaks.begin(), peaks.end(), [&](const BorderDetection& p) {
            return chebyshev(p.location, cand.location) <= min_separation;
        });
        if (!suppressed) peaks.push_back(cand);
    }
    return peaks;
}

Polyline bresenham_line(PixelCoord a, PixelCoord b) {
    // Always trace from the row-major-smaller endpoint so the pixel set is
    // symmetric in its arguments.
    const bool reversed = b < a;
    PixelCoord from = reversed ? b : a;
    const PixelCoord to = reversed ? a : b;

    Polyline out;
    const int dr = std::abs(to.row - from.row);
    const int dc = std::abs(to.col - from.col);
    const int sr = from.row < to.row ? 1 : -1;
    const int sc = from.col < to.col ? 1 : -1;
    int err = dc - dr;
    for (;;) {
        out.push_back(from);
        if (from == to) break;
        const int e2 = 2 * err;
        if (e2 > -dr) {
            err -= dr;
            from.col += sc;
        }
        if (e2 < dc) {
            err += dc;
            from.row += sr;
        }
    }
    if (reversed) std::reverse(out.begin(), out.end());
    return out;
}

void rasterize_segment(PixelCoord a, PixelCoord b, BinaryMask& mask) {
    if (!mask.contains(a) || !mask.contains(b))
        throw InvalidArgument("segment " + to_string(a) + "-" + to_string(b) + " leaves the raster");
    for (const auto& p : bresenham_line(a, b)) mask[p] = 1;
}

BinaryMask threshold(const ProbabilityMap& map, double tau) { return kernels::threshold(map, tau); }

Grid<int> label_components(const BinaryMask& mask, int* count) {
    Grid<int> labels(mask.width(), mask.height(), 0);
    int next = 0;
    std::queue<PixelCoord> frontier;
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask(r, c) || labels(r, c)) continue;
            labels(r, c) = ++next;
            frontier.push({r, c});
            while (!frontier.empty()) {
                const auto p = frontier.front();
                frontier.pop();
                for (int i = 0; i < 8; ++i) {
                    const PixelCoord q{p.row + kRingRow[i], p.col + kRingCol[i]};
                    if (mask.contains(q) && mask[q] && !labels[q]) {
                        labels[q] = next;
                        frontier.push(q);
                    }
                }
            }
        }
    if (count) *count = next;
    return labels;
}

int count_components(const BinaryMask& mask) {
    int n = 0;
    label_components(mask, &n);
    return n;
}

ProbabilityMap to_probability(const BinaryMask& mask) {
    ProbabilityMap out(mask.width(), mask.height(), 0.0);
    for (std::size_t i = 0; i < mask.size(); ++i) out.values()[i] = mask.values()[i] ? 1.0 : 0.0;
    return out;
}

}  // namespace topotrace
