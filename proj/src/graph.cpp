#include "topotrace/graph.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

#include "topotrace/error.hpp"
#include "topotrace/raster.hpp"

namespace topotrace {

namespace {

// Neighbours in row-major order.
constexpr int kNbrRow[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kNbrCol[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

int degree(const BinaryMask& m, PixelCoord p) {
    int d = 0;
    for (int i = 0; i < 8; ++i) d += m.get_or(p.row + kNbrRow[i], p.col + kNbrCol[i], 0) != 0;
    return d;
}

struct NodeUnit {
    PixelCoord rep;
    std::vector<PixelCoord> members;  // row-major
};

// Path from `from` to `to` through the unit's pixels (BFS, row-major
// neighbour order). Both ends included.
Polyline unit_path(const Grid<int>& unit_of, int unit_id, PixelCoord from, PixelCoord to) {
    if (from == to) return {from};
    std::map<PixelCoord, PixelCoord> parent;
    std::queue<PixelCoord> frontier;
    parent[from] = from;
    frontier.push(from);
    while (!frontier.empty()) {
        const auto p = frontier.front();
        frontier.pop();
        if (p == to) break;
        for (int i = 0; i < 8; ++i) {
            const PixelCoord q{p.row + kNbrRow[i], p.col + kNbrCol[i]};
            if (!unit_of.contains(q) || unit_of[q] != unit_id || parent.count(q)) continue;
            parent[q] = p;
            frontier.push(q);
        }
    }
    Polyline path;
    for (PixelCoord p = to;; p = parent.at(p)) {
        path.push_back(p);
        if (p == from) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

void NetworkGraph::add_edge(Polyline points) {
    if (points.size() < 2) throw InvalidArgument("edge needs at least two points");
    const auto first = points.front();
    if (std::all_of(points.begin(), points.end(), [&](PixelCoord p) { return p == first; }))
        throw InvalidArgument("zero-length edge at " + to_string(first));
    nodes_.insert(points.front());
    nodes_.insert(points.back());
    edges_.push_back(std::move(points));
}

double NetworkGraph::total_length() const {
    double total = 0.0;
    for (const auto& e : edges_) total += polyline_length(e);
    return total;
}

std::map<PixelCoord, int> NetworkGraph::node_degrees() const {
    std::map<PixelCoord, int> deg;
    for (const auto& n : nodes_) deg[n] = 0;
    for (const auto& e : edges_) {
        ++deg[e.front()];
        ++deg[e.back()];
    }
    return deg;
}

NetworkGraph raster_to_graph(const BinaryMask& skeleton) {
    const int w = skeleton.width();
    const int h = skeleton.height();
    NetworkGraph graph(w, h);

    Grid<int> deg(w, h, -1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (skeleton(r, c)) deg(r, c) = degree(skeleton, {r, c});

    // Junction clusters: 8-components of degree >= 3 pixels.
    BinaryMask junction(w, h);
    for (std::size_t i = 0; i < deg.size(); ++i) junction.values()[i] = deg.values()[i] >= 3;
    int cluster_count = 0;
    Grid<int> cluster = label_components(junction, &cluster_count);

    // Absorb degree-2 pixels whose two neighbours already sit in one cluster.
    for (bool changed = true; changed;) {
        changed = false;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                if (deg(r, c) != 2 || cluster(r, c)) continue;
                int seen = 0;
                bool same = true;
                for (int i = 0; i < 8; ++i) {
                    const PixelCoord q{r + kNbrRow[i], c + kNbrCol[i]};
                    if (!skeleton.contains(q) || !skeleton[q]) continue;
                    if (!cluster[q] || (seen && cluster[q] != seen)) same = false;
                    seen = cluster[q];
                }
                if (same && seen) {
                    cluster(r, c) = seen;
                    changed = true;
                }
            }
    }

    // Node units: clusters first gather members, then endpoints / isolated pixels.
    std::vector<NodeUnit> units(static_cast<std::size_t>(cluster_count));
    Grid<int> unit_of(w, h, -1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (cluster(r, c)) {
                units[static_cast<std::size_t>(cluster(r, c) - 1)].members.push_back({r, c});
                unit_of(r, c) = cluster(r, c) - 1;
            }
    for (auto& unit : units) {
        double cr = 0, cc = 0;
        for (const auto& p : unit.members) {
            cr += p.row;
            cc += p.col;
        }
        cr /= static_cast<double>(unit.members.size());
        cc /= static_cast<double>(unit.members.size());
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : unit.members) {
            const double d = (p.row - cr) * (p.row - cr) + (p.col - cc) * (p.col - cc);
            if (d < best - 1e-12) {
                best = d;
                unit.rep = p;
            }
        }
    }
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (deg(r, c) == 0 || deg(r, c) == 1) {
                unit_of(r, c) = static_cast<int>(units.size());
                units.push_back({{r, c}, {{r, c}}});
            }

    std::vector<std::size_t> order(units.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return units[a].rep < units[b].rep; });

    BinaryMask visited(w, h);
    for (const auto ui : order) {
        const auto& unit = units[ui];
        const int uid = static_cast<int>(ui);
        graph.add_node(unit.rep);
        for (const auto& u : unit.members) {
            for (int i = 0; i < 8; ++i) {
                const PixelCoord v{u.row + kNbrRow[i], u.col + kNbrCol[i]};
                if (!skeleton.contains(v) || !skeleton[v]) continue;
                const int vid = unit_of[v];
                if (vid == uid) continue;
                if (vid >= 0) {
                    if (uid < vid) {
                        auto edge = unit_path(unit_of, uid, unit.rep, u);
                        auto tail = unit_path(unit_of, vid, v,
                                              units[static_cast<std::size_t>(vid)].rep);
                        edge.insert(edge.end(), tail.begin(), tail.end());
                        graph.add_edge(std::move(edge));
                    }
                    continue;
                }
                if (visited[v]) continue;

                // A chain pixel has exactly two neighbours: step to the one we
                // did not come from until a node unit is reached.
                Polyline chain{v};
                visited[v] = 1;
                PixelCoord prev = u;
                PixelCoord cur = v;
                int end_unit = -1;
                PixelCoord end_pixel{};
                for (;;) {
                    std::optional<PixelCoord> next;
                    for (int k = 0; k < 8 && !next; ++k) {
                        const PixelCoord q{cur.row + kNbrRow[k], cur.col + kNbrCol[k]};
                        if (q != prev && skeleton.contains(q) && skeleton[q]) next = q;
                    }
                    if (!next) break;
                    if (unit_of[*next] >= 0) {
                        end_unit = unit_of[*next];
                        end_pixel = *next;
                        break;
                    }
                    if (visited[*next]) break;
                    visited[*next] = 1;
                    chain.push_back(*next);
                    prev = cur;
                    cur = *next;
                }
                if (end_unit < 0) continue;  // defensive: malformed chain
                auto edge = unit_path(unit_of, uid, unit.rep, u);
                edge.insert(edge.end(), chain.begin(), chain.end());
                const auto& end = units[static_cast<std::size_t>(end_unit)];
                auto tail = unit_path(unit_of, end_unit, end_pixel, end.rep);
                edge.insert(edge.end(), tail.begin(), tail.end());
                graph.add_edge(std::move(edge));
            }
        }
    }

    // Node-free cycles.
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (deg(r, c) != 2 || unit_of(r, c) >= 0 || visited(r, c)) continue;
            const PixelCoord anchor{r, c};
            visited[anchor] = 1;
            Polyline loop{anchor};
            PixelCoord prev = anchor;
            PixelCoord cur = anchor;
            for (;;) {
                PixelCoord next = anchor;
                bool found = false;
                for (int k = 0; k < 8; ++k) {
                    const PixelCoord q{cur.row + kNbrRow[k], cur.col + kNbrCol[k]};
                    if (q == prev || !skeleton.contains(q) || !skeleton[q]) continue;
                    if (q == anchor && loop.size() > 2) {
                        next = q;
                        found = true;
                        break;
                    }
                    if (!visited[q]) {
                        next = q;
                        found = true;
                        break;
                    }
                }
                if (!found) break;
                loop.push_back(next);
                if (next == anchor) break;
                visited[next] = 1;
                prev = cur;
                cur = next;
            }
            if (loop.size() > 1 && loop.back() == anchor)
                graph.add_edge(std::move(loop));
            else
                graph.add_node(anchor);
        }

    // Junction-cluster pixels that no edge passes through stay as bare nodes.
    BinaryMask covered(w, h);
    for (const auto& e : graph.edges())
        for (const auto& p : e) covered[p] = 1;
    for (const auto& n : graph.nodes()) covered[n] = 1;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (skeleton(r, c) && !covered(r, c)) graph.add_node({r, c});
    return graph;
}

BinaryMask graph_to_raster(const NetworkGraph& graph, int width, int height) {
    BinaryMask mask(width, height);
    for (std::size_t e = 0; e < graph.edges().size(); ++e) {
        const auto& pts = graph.edges()[e];
        for (const auto& p : pts)
            if (!mask.contains(p))
                throw InvalidArgument("edge " + std::to_string(e) + " has point " + to_string(p) +
                                      " outside the " + std::to_string(width) + "x" + std::to_string(height) +
                                      " raster");
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) rasterize_segment(pts[i], pts[i + 1], mask);
        if (pts.size() == 1) mask[pts.front()] = 1;
    }
    for (const auto& n : graph.nodes()) {
        if (!mask.contains(n)) throw InvalidArgument("node " + to_string(n) + " outside the raster");
        mask[n] = 1;
    }
    return mask;
}

BinaryMask graph_to_raster(const NetworkGraph& graph) { return graph_to_raster(graph, graph.width(), graph.height()); }

std::vector<Segment> extract_segments(const NetworkGraph& graph) {
    const auto& edges = graph.edges();
    const auto degrees = graph.node_degrees();

    struct Incidence {
        std::size_t edge;
        bool at_end;
    };
    std::map<PixelCoord, std::vector<Incidence>> incident;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        incident[edges[e].front()].push_back({e, false});
        incident[edges[e].back()].push_back({e, true});
    }

    std::vector<bool> used(edges.size(), false);
    std::vector<Segment> segments;

    // Appends edge `inc` oriented away from its node; returns the far node.
    auto append = [&](Polyline& path, Incidence inc) {
        used[inc.edge] = true;
        Polyline pts = edges[inc.edge];
        if (inc.at_end) std::reverse(pts.begin(), pts.end());
        path.insert(path.end(), pts.begin() + (path.empty() ? 0 : 1), pts.end());
        return pts.back();
    };
    auto next_unused = [&](PixelCoord node) -> std::optional<Incidence> {
        for (const auto& inc : incident[node])
            if (!used[inc.edge]) return inc;
        return std::nullopt;
    };
    auto walk = [&](PixelCoord start, Incidence first) {
        Segment seg;
        seg.start = start;
        PixelCoord cur = append(seg.path, first);
        while (cur != start && degrees.at(cur) == 2) {
            const auto inc = next_unused(cur);
            if (!inc) break;
            cur = append(seg.path, *inc);
        }
        seg.end = cur;
        seg.length = polyline_length(seg.path);
        segments.push_back(std::move(seg));
    };

    for (const auto& [node, deg] : degrees) {
        if (deg == 2 || deg == 0) continue;
        while (auto inc = next_unused(node)) walk(node, *inc);
    }
    for (const auto& [node, deg] : degrees) {
        if (deg != 2) continue;
        while (auto inc = next_unused(node)) walk(node, *inc);
    }
    return segments;
}

GraphIndex::GraphIndex(const NetworkGraph& graph) {
    for (const auto& e : graph.edges()) points_.insert(points_.end(), e.begin(), e.end());
    points_.insert(points_.end(), graph.nodes().begin(), graph.nodes().end());
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
    arcs_.resize(points_.size());
    for (const auto& e : graph.edges())
        for (std::size_t i = 0; i + 1 < e.size(); ++i) {
            if (e[i] == e[i + 1]) continue;
            const int a = *find(e[i]);
            const int b = *find(e[i + 1]);
            const double wgt = euclidean(e[i], e[i + 1]);
            arcs_[static_cast<std::size_t>(a)].push_back({b, wgt});
            arcs_[static_cast<std::size_t>(b)].push_back({a, wgt});
        }
}

std::optional<int> GraphIndex::find(PixelCoord p) const {
    const auto it = std::lower_bound(points_.begin(), points_.end(), p);
    if (it == points_.end() || *it != p) return std::nullopt;
    return static_cast<int>(it - points_.begin());
}

std::pair<PixelCoord, double> GraphIndex::nearest(PixelCoord q) const {
    if (points_.empty()) throw InvalidArgument("empty graph");
    long best = std::numeric_limits<long>::max();
    PixelCoord best_point{};
    for (const auto& p : points_) {
        const long d2 = squared_distance(p, q);
        if (d2 < best) {
            best = d2;
            best_point = p;
        }
    }
    return {best_point, std::sqrt(static_cast<double>(best))};
}

std::optional<GraphPath> GraphIndex::shortest_path(PixelCoord a, PixelCoord b,
                                                   const std::vector<PixelCoord>& blocked) const {
    const auto ia = find(a);
    const auto ib = find(b);
    if (!ia) throw InvalidArgument("point " + to_string(a) + " is not on the graph");
    if (!ib) throw InvalidArgument("point " + to_string(b) + " is not on the graph");
    if (*ia == *ib) return GraphPath{{a}, 0.0};

    const std::size_t n = points_.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::vector<bool> closed(n, false);
    for (const auto& p : blocked)
        if (auto i = find(p); i && *i != *ia && *i != *ib) closed[static_cast<std::size_t>(*i)] = true;

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(*ia)] = 0.0;
    heap.push({0.0, *ia});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        const auto uu = static_cast<std::size_t>(u);
        if (closed[uu]) continue;
        closed[uu] = true;
        if (u == *ib) break;
        for (const auto& arc : arcs_[uu]) {
            const auto v = static_cast<std::size_t>(arc.to);
            if (closed[v]) continue;
            const double nd = d + arc.weight;
            if (nd < dist[v]) {
                dist[v] = nd;
                parent[v] = u;
                heap.push({nd, arc.to});
            }
        }
    }
    const auto target = static_cast<std::size_t>(*ib);
    if (parent[target] < 0) return std::nullopt;
    GraphPath path;
    for (int v = *ib; v >= 0; v = parent[static_cast<std::size_t>(v)]) {
        path.points.push_back(points_[static_cast<std::size_t>(v)]);
        if (v == *ia) break;
    }
    std::reverse(path.points.begin(), path.points.end());
    path.length = polyline_length(path.points);
    return path;
}

std::pair<PixelCoord, double> nearest_graph_point(const NetworkGraph& graph, PixelCoord q) {
    return GraphIndex(graph).nearest(q);
}

std::optional<GraphPath> graph_shortest_path(const NetworkGraph& graph, PixelCoord a, PixelCoord b) {
    return GraphIndex(graph).shortest_path(a, b);
}

}  // namespace topotrace
