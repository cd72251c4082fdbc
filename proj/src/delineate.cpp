#include "topotrace/delineate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace topotrace {

namespace {

constexpr double kEpsilon = 1e-3;
constexpr double kSqrt2 = 1.4142135623730951;

double step_cost(const ProbabilityMap& probmap, PixelCoord from, PixelCoord to) {
    const double step = (from.row != to.row && from.col != to.col) ? kSqrt2 : 1.0;
    return step * (1.0 - probmap[to] + kEpsilon);
}

}  // namespace

void DelineationConfig::validate() const {
    oracle.validate();
    if (!(tau_conf >= 0.0 && tau_conf <= 1.0)) throw InvalidArgument("tau_conf must be in [0,1]");
    if (!(tau_restart >= 0.0 && tau_restart <= 1.0)) throw InvalidArgument("tau_restart must be in [0,1]");
    if (r_nbhd < 1) throw InvalidArgument("r_nbhd must be >= 1");
    if (d_restart && !(*d_restart > 0.0)) throw InvalidArgument("d_restart must be > 0");
    if (max_steps && *max_steps <= 0) throw InvalidArgument("max_steps must be > 0");
}

long DelineationConfig::step_limit(int width, int height) const {
    if (max_steps) return *max_steps;
    return std::max(1L, 4L * width * height / r_nbhd);
}

double path_cost(const ProbabilityMap& probmap, const Polyline& path) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) total += step_cost(probmap, path[i - 1], path[i]);
    return total;
}

Window link_window(const ProbabilityMap& probmap, PixelCoord a, PixelCoord b, const OracleConfig& cfg) {
    return Window::spanning(a, b, cfg.patch_half(), probmap.width(), probmap.height());
}

LinkedPath link_shortest_path(const ProbabilityMap& probmap, PixelCoord a, PixelCoord b, const Window& window) {
    if (window.empty() || window.row0 < 0 || window.col0 < 0 || window.row1 >= probmap.height() ||
        window.col1 >= probmap.width())
        throw InvalidArgument("link window leaves the probability map");
    if (!window.contains(a) || !window.contains(b))
        throw InvalidArgument("link endpoint " + to_string(window.contains(a) ? b : a) + " outside the window");
    if (a == b) return {{a}, 0.0};

    const int w = window.width();
    auto local = [&](PixelCoord p) {
        return static_cast<std::size_t>(p.row - window.row0) * static_cast<std::size_t>(w) +
               static_cast<std::size_t>(p.col - window.col0);
    };
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(window.height());
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<PixelCoord> parent(n);
    std::vector<std::uint8_t> done(n, 0);

    using Item = std::tuple<double, int, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[local(a)] = 0.0;
    heap.emplace(0.0, a.row, a.col);
    while (!heap.empty()) {
        const auto [d, r, c] = heap.top();
        heap.pop();
        const PixelCoord p{r, c};
        if (done[local(p)]) continue;
        done[local(p)] = 1;
        if (p == b) break;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                const PixelCoord q{r + dr, c + dc};
                if ((dr == 0 && dc == 0) || !window.contains(q) || done[local(q)]) continue;
                const double nd = d + step_cost(probmap, p, q);
                if (nd < dist[local(q)]) {
                    dist[local(q)] = nd;
                    parent[local(q)] = p;
                    heap.emplace(nd, q.row, q.col);
                }
            }
    }

    LinkedPath out;
    out.cost = dist[local(b)];
    for (PixelCoord p = b; p != a; p = parent[local(p)]) out.points.push_back(p);
    out.points.push_back(a);
    std::reverse(out.points.begin(), out.points.end());
    return out;
}

DelineationEngine::DelineationEngine(const ProbabilityMap& probmap, const ConnectivityOracle& oracle,
                                     DelineationConfig cfg)
    : probmap_(probmap),
      oracle_(oracle),
      cfg_(std::move(cfg)),
      graph_(probmap.width(), probmap.height()),
      covered_(probmap.width(), probmap.height(), 0) {
    cfg_.validate();
}

std::optional<PixelCoord> DelineationEngine::select_start() {
    std::optional<PixelCoord> best;
    double best_value = 0.0;
    for (int r = 0; r < probmap_.height(); ++r)
        for (int c = 0; c < probmap_.width(); ++c) {
            const double v = probmap_(r, c);
            if (started_ && (v < cfg_.tau_restart || covered_(r, c))) continue;
            if (!best || v > best_value) {
                best = PixelCoord{r, c};
                best_value = v;
            }
        }
    if (!started_ && best && best_value <= 0.0) return std::nullopt;
    return best;
}

void DelineationEngine::visit(PixelCoord p) {
    visited_.push_back(p);
    visited_set_.insert(p);
    graph_.add_node(p);
    ++report_.visited;

    const double radius = cfg_.restart_distance();
    const long limit2 = static_cast<long>(std::floor(radius * radius));
    const int reach = static_cast<int>(std::floor(radius));
    for (int r = std::max(0, p.row - reach); r <= std::min(probmap_.height() - 1, p.row + reach); ++r)
        for (int c = std::max(0, p.col - reach); c <= std::min(probmap_.width() - 1, p.col + reach); ++c)
            if (squared_distance(p, {r, c}) <= limit2) covered_(r, c) = 1;
}

void DelineationEngine::notify(PixelCoord p, std::optional<PixelCoord> precedent, double confidence) {
    if (observer_) observer_({report_.steps, p, precedent, confidence, graph_, visited_, bag_.size()});
}

void DelineationEngine::link(PixelCoord a, PixelCoord b) {
    if (a == b) return;
    const auto key = a < b ? std::pair{a, b} : std::pair{b, a};
    if (!linked_.insert(key).second) return;
    auto path = link_shortest_path(probmap_, a, b, link_window(probmap_, a, b, cfg_.oracle));
    graph_.add_edge(std::move(path.points));
    ++report_.edges;
}

std::optional<PixelCoord> DelineationEngine::nearest_visited(PixelCoord p, std::optional<PixelCoord> exclude) const {
    std::optional<PixelCoord> best;
    long best_d2 = 0;
    const auto lo = visited_set_.lower_bound({p.row - cfg_.r_nbhd, std::numeric_limits<int>::min()});
    const auto hi = visited_set_.upper_bound({p.row + cfg_.r_nbhd, std::numeric_limits<int>::max()});
    for (auto it = lo; it != hi; ++it) {
        const PixelCoord v = *it;
        if (exclude && v == *exclude) continue;
        if (chebyshev(v, p) > cfg_.r_nbhd) continue;
        const long d2 = squared_distance(v, p);
        if (!best || d2 < best_d2) {
            best = v;
            best_d2 = d2;
        }
    }
    return best;
}

void DelineationEngine::expand(PixelCoord center, std::optional<PixelCoord> precedent) {
    for (const auto& det : oracle_.predict(center)) {
        if (det.confidence < cfg_.tau_conf || det.location == center) continue;
        if (precedent && chebyshev(det.location, *precedent) <= cfg_.r_nbhd) {
            ++report_.discarded;
            continue;
        }
        if (const auto pv = nearest_visited(det.location, center)) {
            link(center, *pv);
            ++report_.snapped;
            continue;
        }
        bag_.push({det.location, det.confidence, center, next_insertion_++});
        ++report_.pushed;
        report_.bag_high_water = std::max(report_.bag_high_water, static_cast<long>(bag_.size()));
    }
}

NetworkGraph DelineationEngine::run() {
    const long limit = cfg_.step_limit(probmap_.width(), probmap_.height());
    while (const auto start = select_start()) {
        if (started_) ++report_.restarts;
        started_ = true;
        visit(*start);
        notify(*start, std::nullopt, 1.0);
        expand(*start, std::nullopt);

        while (!bag_.empty()) {
            if (++report_.steps > limit) {
                --report_.steps;
                throw MaxStepsExceeded(graph_, report_);
            }
            const ExplorationEntry entry = bag_.top();
            bag_.pop();

            if (const auto pv = nearest_visited(entry.location, std::nullopt)) {
                if (*pv != entry.precedent) link(entry.precedent, *pv);
                ++report_.merged;
                continue;
            }
            visit(entry.location);
            link(entry.precedent, entry.location);
            notify(entry.location, entry.precedent, entry.confidence);
            expand(entry.location, entry.precedent);
        }
    }
    return graph_;
}

NetworkGraph delineate(const ProbabilityMap& probmap, const ConnectivityOracle& oracle, const DelineationConfig& cfg,
                       TraceReport* report) {
    DelineationEngine engine(probmap, oracle, cfg);
    NetworkGraph graph = engine.run();
    if (report) *report = engine.report();
    return graph;
}

}  // namespace topotrace
