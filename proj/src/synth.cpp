#include "topotrace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <set>

#include "topotrace/kernels.hpp"
#include "topotrace/random.hpp"
#include "topotrace/raster.hpp"

namespace topotrace {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kTurn = 20.0 * kDeg;
constexpr double kBranchAngle = 60.0 * kDeg;
constexpr double kBranchJitter = 15.0 * kDeg;
constexpr int kOwnSeparation = 2;
constexpr int kOriginExemption = 3;
constexpr int kRecentExemption = 4;
constexpr int kComponentRetries = 200;

enum Salt : std::uint64_t { kGrowth = 0, kNoise = 1, kGaps = 2, kClutter = 3 };

struct TreePixel {
    PixelCoord p;
    int parent;
};

struct Spawn {
    int origin;
    double heading;
    int depth;
};

class Grower {
public:
    Grower(const SynthParams& params, SplitMix64& rng)
        : params_(params),
          rng_(rng),
          forbidden_(params.width, params.height, 0),
          index_(params.width, params.height, -1) {}

    // Lenient walks may also stop at an earlier component's keep-out zone.
    void set_lenient(bool lenient) { lenient_ = lenient; }

    bool grow_component() {
        const int margin = std::min(2 * params_.step_len, std::min(params_.width, params_.height) / 4);
        const PixelCoord root{rng_.uniform_int(margin, params_.height - 1 - margin),
                              rng_.uniform_int(margin, params_.width - 1 - margin)};
        const double heading0 = rng_.uniform(0.0, 2.0 * std::numbers::pi);
        if (forbidden_[root]) return false;

        component_start_ = static_cast<int>(pixels_.size());
        append(root, -1);
        spawned_ = 0;
        std::deque<Spawn> queue;
        for (int i = 0; i < params_.n_seeds; ++i) {
            const double heading = heading0 + 2.0 * std::numbers::pi * i / params_.n_seeds;
            if (!walk({component_start_, heading, 0}, queue)) {
                truncate(component_start_);
                return false;
            }
        }
        while (!queue.empty()) {
            const Spawn spawn = queue.front();
            queue.pop_front();
            walk(spawn, queue);
        }
        commit();
        return true;
    }

    NetworkGraph build_graph() const {
        const auto n = pixels_.size();
        std::vector<std::vector<int>> adj(n);
        for (std::size_t i = 0; i < n; ++i)
            if (pixels_[i].parent >= 0) {
                adj[i].push_back(pixels_[i].parent);
                adj[static_cast<std::size_t>(pixels_[i].parent)].push_back(static_cast<int>(i));
            }
        std::vector<int> nodes;
        for (std::size_t i = 0; i < n; ++i)
            if (adj[i].size() != 2) nodes.push_back(static_cast<int>(i));
        std::sort(nodes.begin(), nodes.end(), [&](int a, int b) { return pixels_[a].p < pixels_[b].p; });

        NetworkGraph graph(params_.width, params_.height);
        std::set<std::pair<int, int>> used;
        auto key = [](int a, int b) { return std::pair{std::min(a, b), std::max(a, b)}; };
        for (int node : nodes) {
            graph.add_node(pixels_[static_cast<std::size_t>(node)].p);
            for (int next : adj[static_cast<std::size_t>(node)]) {
                if (used.count(key(node, next))) continue;
                Polyline line{pixels_[static_cast<std::size_t>(node)].p};
                int prev = node;
                int cur = next;
                for (;;) {
                    used.insert(key(prev, cur));
                    line.push_back(pixels_[static_cast<std::size_t>(cur)].p);
                    const auto& nb = adj[static_cast<std::size_t>(cur)];
                    if (nb.size() != 2) break;
                    const int step = nb[0] == prev ? nb[1] : nb[0];
                    prev = cur;
                    cur = step;
                }
                graph.add_edge(std::move(line));
            }
        }
        return graph;
    }

private:
    void append(PixelCoord p, int parent) {
        index_[p] = static_cast<int>(pixels_.size());
        pixels_.push_back({p, parent});
    }

    void truncate(int size) {
        while (static_cast<int>(pixels_.size()) > size) {
            index_[pixels_.back().p] = -1;
            pixels_.pop_back();
        }
    }

    // Endpoint of one step; `border` reports that the step hit the image edge.
    PixelCoord advance(PixelCoord pos, double heading, bool& border) const {
        const double dr = std::sin(heading);
        const double dc = std::cos(heading);
        const double step = params_.step_len;
        const int max_r = params_.height - 1;
        const int max_c = params_.width - 1;
        double t = step;
        int axis = -1;
        if (dr > 1e-12 && (max_r - pos.row) / dr < t) t = (max_r - pos.row) / dr, axis = 0;
        if (dr < -1e-12 && -pos.row / dr < t) t = -pos.row / dr, axis = 0;
        if (dc > 1e-12 && (max_c - pos.col) / dc < t) t = (max_c - pos.col) / dc, axis = 1;
        if (dc < -1e-12 && -pos.col / dc < t) t = -pos.col / dc, axis = 1;
        PixelCoord out{std::clamp(static_cast<int>(std::lround(pos.row + t * dr)), 0, max_r),
                       std::clamp(static_cast<int>(std::lround(pos.col + t * dc)), 0, max_c)};
        if (axis == 0) out.row = dr > 0 ? max_r : 0;
        if (axis == 1) out.col = dc > 0 ? max_c : 0;
        border = axis >= 0;
        return out;
    }

    int border_distance(PixelCoord p) const {
        return std::min({p.row, p.col, params_.height - 1 - p.row, params_.width - 1 - p.col});
    }

    bool separated(PixelCoord q, int walk_start, PixelCoord origin) const {
        if (chebyshev(q, origin) <= kOriginExemption) return true;
        const int recent = static_cast<int>(pixels_.size()) - kRecentExemption;
        for (int r = q.row - kOwnSeparation; r <= q.row + kOwnSeparation; ++r)
            for (int c = q.col - kOwnSeparation; c <= q.col + kOwnSeparation; ++c) {
                if (!index_.contains(r, c)) continue;
                const int i = index_(r, c);
                if (i < 0) continue;
                if (i >= walk_start && i >= recent) continue;
                return false;
            }
        return true;
    }

    bool walk(const Spawn& spawn, std::deque<Spawn>& queue) {
        const int walk_start = static_cast<int>(pixels_.size());
        const PixelCoord origin = pixels_[static_cast<std::size_t>(spawn.origin)].p;
        const int max_steps = 4 * (params_.width + params_.height) / params_.step_len + 4;
        std::vector<Spawn> pending;
        int cur = spawn.origin;
        double heading = spawn.heading;
        for (int step = 0; step < max_steps; ++step) {
            heading += rng_.uniform(-kTurn, kTurn);
            bool border = false;
            const PixelCoord pos = pixels_[static_cast<std::size_t>(cur)].p;
            const PixelCoord target = advance(pos, heading, border);
            const auto line = bresenham_line(pos, target);
            for (std::size_t i = 1; i < line.size(); ++i) {
                const PixelCoord q = line[i];
                const int parent = pixels_[static_cast<std::size_t>(cur)].parent;
                const bool protected_tail =
                    cur < walk_start || (!pending.empty() && pending.back().origin == cur);
                if (!protected_tail && parent >= 0 && chebyshev(pixels_[static_cast<std::size_t>(parent)].p, q) == 1) {
                    truncate(cur);
                    cur = parent;
                }
                if (lenient_ && forbidden_[q] && static_cast<int>(pixels_.size()) - walk_start >= params_.step_len) {
                    for (const auto& s : pending) queue.push_back(s);
                    return true;
                }
                if (forbidden_[q] || index_[q] >= 0 || !separated(q, walk_start, origin)) {
                    truncate(walk_start);
                    return false;
                }
                append(q, cur);
                cur = static_cast<int>(pixels_.size()) - 1;
            }
            if (border) {
                if (static_cast<int>(pixels_.size()) - walk_start < params_.step_len) break;
                for (const auto& s : pending) queue.push_back(s);
                return true;
            }
            if (rng_.uniform() < params_.branch_prob && spawn.depth < params_.max_branch_depth &&
                spawned_ < params_.max_branches && border_distance(pixels_[static_cast<std::size_t>(cur)].p) >= params_.step_len) {
                const double side = rng_.uniform() < 0.5 ? -1.0 : 1.0;
                const double angle = kBranchAngle + rng_.uniform(-kBranchJitter, kBranchJitter);
                pending.push_back({cur, heading + side * angle, spawn.depth + 1});
                ++spawned_;
            }
        }
        truncate(walk_start);
        return false;
    }

    void commit() {
        const long reach = 2L * params_.step_len;
        const long limit = reach * reach;
        for (std::size_t i = static_cast<std::size_t>(component_start_); i < pixels_.size(); ++i) {
            const PixelCoord p = pixels_[i].p;
            for (long dr = -reach; dr <= reach; ++dr)
                for (long dc = -reach; dc <= reach; ++dc) {
                    const PixelCoord q{p.row + static_cast<int>(dr), p.col + static_cast<int>(dc)};
                    if (forbidden_.contains(q) && dr * dr + dc * dc < limit) forbidden_[q] = 1;
                }
        }
    }

    const SynthParams& params_;
    SplitMix64& rng_;
    BinaryMask forbidden_;
    Grid<int> index_;
    std::vector<TreePixel> pixels_;
    int component_start_ = 0;
    int spawned_ = 0;
    bool lenient_ = false;
};

BinaryMask dilate(const BinaryMask& mask, int radius) {
    if (radius <= 0) return mask;
    BinaryMask rows(mask.width(), mask.height(), 0);
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c)
            for (int d = -radius; d <= radius && !rows(r, c); ++d) rows(r, c) = mask.get_or(r, c + d, 0) != 0;
    BinaryMask out(mask.width(), mask.height(), 0);
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c)
            for (int d = -radius; d <= radius && !out(r, c); ++d) out(r, c) = rows.get_or(r + d, c, 0) != 0;
    return out;
}

void carve_gaps(const BinaryMask& mask, const SynthParams& params, ProbabilityMap& map) {
    const auto& cp = params.corruption;
    if (cp.gap_count <= 0) return;
    constexpr int kNodeClearance = 3;
    const NetworkGraph graph = raster_to_graph(mask);

    std::vector<Polyline> candidates;
    for (const auto& edge : graph.edges()) {
        const int n = static_cast<int>(edge.size());
        for (int i = kNodeClearance; i + cp.gap_len - 1 <= n - 1 - kNodeClearance; ++i) {
            Polyline run(edge.begin() + i, edge.begin() + i + cp.gap_len);
            const bool clear = std::all_of(run.begin(), run.end(), [&](PixelCoord p) {
                return std::all_of(graph.nodes().begin(), graph.nodes().end(),
                                   [&](PixelCoord node) { return chebyshev(p, node) >= kNodeClearance; });
            });
            if (clear) candidates.push_back(std::move(run));
        }
    }
    if (candidates.empty()) return;

    SplitMix64 rng = SplitMix64::stream(params.seed, kGaps);
    BinaryMask carved(mask.width(), mask.height(), 0);
    const int spacing = cp.blur_radius + 2;
    int placed = 0;
    for (int attempt = 0; attempt < 50 * cp.gap_count && placed < cp.gap_count; ++attempt) {
        const auto& run = candidates[static_cast<std::size_t>(rng.uniform_int(candidates.size()))];
        const bool overlaps = std::any_of(run.begin(), run.end(), [&](PixelCoord p) {
            for (int r = p.row - spacing; r <= p.row + spacing; ++r)
                for (int c = p.col - spacing; c <= p.col + spacing; ++c)
                    if (carved.get_or(r, c, 0)) return true;
            return false;
        });
        if (overlaps) continue;
        for (const auto& p : run) {
            carved[p] = 1;
            map[p] = rng.uniform(0.0, 0.1);
        }
        std::set<PixelCoord> shoulder;
        for (const auto& p : run)
            for (int r = p.row - cp.blur_radius; r <= p.row + cp.blur_radius; ++r)
                for (int c = p.col - cp.blur_radius; c <= p.col + cp.blur_radius; ++c)
                    if (mask.contains(r, c) && !mask(r, c)) shoulder.insert({r, c});
        for (const auto& p : shoulder) map[p] = std::min(map[p], rng.uniform(0.0, 0.1));
        ++placed;
    }
}

void add_clutter(const BinaryMask& mask, const SynthParams& params, ProbabilityMap& map) {
    const auto& cp = params.corruption;
    if (cp.clutter_count <= 0) return;
    constexpr int kStrokeSpacing = 3;
    SplitMix64 rng = SplitMix64::stream(params.seed, kClutter);
    BinaryMask keepout = dilate(mask, cp.blur_radius + 4);
    int placed = 0;
    for (int attempt = 0; attempt < 200 * cp.clutter_count && placed < cp.clutter_count; ++attempt) {
        const int length = rng.uniform_int(8, 16);
        const PixelCoord a{rng.uniform_int(0, mask.height() - 1), rng.uniform_int(0, mask.width() - 1)};
        const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const PixelCoord b{static_cast<int>(std::lround(a.row + (length - 1) * std::sin(heading))),
                           static_cast<int>(std::lround(a.col + (length - 1) * std::cos(heading)))};
        if (!mask.contains(b)) continue;
        const auto stroke = bresenham_line(a, b);
        if (std::any_of(stroke.begin(), stroke.end(), [&](PixelCoord p) { return keepout[p] != 0; })) continue;
        BinaryMask drawn(mask.width(), mask.height(), 0);
        for (const auto& p : stroke) {
            map[p] = rng.uniform(0.85, 1.0);
            drawn[p] = 1;
        }
        const auto zone = dilate(drawn, kStrokeSpacing);
        for (std::size_t i = 0; i < zone.size(); ++i) keepout.values()[i] |= zone.values()[i];
        ++placed;
    }
}

}  // namespace

void SynthParams::validate() const {
    if (width < 64 || height < 64) throw InvalidArgument("synthetic scenes must be at least 64x64");
    if (n_seeds < 1) throw InvalidArgument("n_seeds must be >= 1");
    if (n_components < 0) throw InvalidArgument("n_components must be >= 0");
    if (!(branch_prob >= 0.0 && branch_prob <= 1.0)) throw InvalidArgument("branch_prob must be in [0,1]");
    if (step_len < 2) throw InvalidArgument("step_len must be >= 2");
    if (max_branches < 0 || max_branch_depth < 0) throw InvalidArgument("branch limits must be >= 0");
    const auto& c = corruption;
    if (c.blur_radius < 0) throw InvalidArgument("blur_radius must be >= 0");
    if (!(c.noise_amp >= 0.0 && c.noise_amp <= 1.0)) throw InvalidArgument("noise_amp must be in [0,1]");
    if (c.gap_count < 0 || c.clutter_count < 0) throw InvalidArgument("gap and clutter counts must be >= 0");
    if (c.gap_len < 1) throw InvalidArgument("gap_len must be >= 1");
}

SynthScene generate_network(const SynthParams& params) {
    params.validate();
    SplitMix64 rng = SplitMix64::stream(params.seed, kGrowth);
    Grower grower(params, rng);
    for (int comp = 0; comp < params.n_components; ++comp) {
        bool placed = false;
        for (int attempt = 0; attempt < kComponentRetries && !placed; ++attempt) {
            grower.set_lenient(attempt >= kComponentRetries / 2);
            placed = grower.grow_component();
        }
        if (!placed)
            throw Error("could not place component " + std::to_string(comp + 1) + " after " +
                        std::to_string(kComponentRetries) + " attempts");
    }
    SynthScene scene;
    scene.graph = grower.build_graph();
    scene.mask = graph_to_raster(scene.graph, params.width, params.height);
    return scene;
}

ProbabilityMap corrupt(const BinaryMask& mask, const SynthParams& params) {
    params.validate();
    const auto& cp = params.corruption;
    ProbabilityMap map = cp.blur_radius > 0 ? kernels::line_box_blur(mask, cp.blur_radius) : to_probability(mask);
    if (cp.noise_amp > 0.0) {
        SplitMix64 rng = SplitMix64::stream(params.seed, kNoise);
        for (auto& v : map.values()) v += rng.uniform(-cp.noise_amp, cp.noise_amp);
    }
    carve_gaps(mask, params, map);
    add_clutter(mask, params, map);
    for (auto& v : map.values()) v = std::clamp(v, 0.0, 1.0);
    return map;
}

}  // namespace topotrace
