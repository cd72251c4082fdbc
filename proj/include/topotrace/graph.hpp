#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "topotrace/grid.hpp"

namespace topotrace {

/// Undirected graph of pixel-anchored nodes joined by polyline edges.
///
/// Every edge's first and last point is a node. Closed edges (first == last)
/// are allowed as long as they have positive length; a degenerate edge that
/// never leaves its start point is rejected.
class NetworkGraph {
public:
    NetworkGraph() = default;
    NetworkGraph(int width, int height) : width_(width), height_(height) {}

    int width() const { return width_; }
    int height() const { return height_; }

    const std::set<PixelCoord>& nodes() const { return nodes_; }
    const std::vector<Polyline>& edges() const { return edges_; }

    bool empty() const { return nodes_.empty() && edges_.empty(); }

    void add_node(PixelCoord p) { nodes_.insert(p); }

    /// Appends an edge and inserts its endpoints as nodes.
    void add_edge(Polyline points);

    /// Sum of all edge lengths.
    double total_length() const;

    /// Number of edge ends incident to each node (a closed edge counts twice).
    std::map<PixelCoord, int> node_degrees() const;

    friend bool operator==(const NetworkGraph&, const NetworkGraph&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::set<PixelCoord> nodes_;
    std::vector<Polyline> edges_;
};

/// A ground-truth unit for the connectivity metric: the path between two
/// consecutive junctions, between an endpoint and its junction, or through a
/// junction-free component.
struct Segment {
    PixelCoord start;
    PixelCoord end;
    Polyline path;
    double length = 0.0;

    bool closed() const { return start == end; }
};

/// Traces a one-pixel-wide skeleton into a graph.
///
/// Pixels with 8-neighbour degree 1 become endpoint nodes. Adjacent pixels of
/// degree >= 3 form junction clusters; each cluster is represented by the
/// pixel closest to its centroid and arms attach to it through the cluster.
/// Maximal degree-2 chains become edges; a cycle with no node gets its
/// row-major-first pixel as anchor. Isolated pixels become isolated nodes.
NetworkGraph raster_to_graph(const BinaryMask& skeleton);

/// Sweeps every edge with a one-pixel-wide line; isolated nodes are drawn
/// too. Throws InvalidArgument naming the offending edge when a point lies
/// outside the raster.
BinaryMask graph_to_raster(const NetworkGraph& graph, int width, int height);
BinaryMask graph_to_raster(const NetworkGraph& graph);

/// Decomposes a graph into segments. Junction = degree >= 3, endpoint =
/// degree 1; degree-2 nodes are passed through. Junction-free components
/// contribute one segment each (a cycle starts and ends at its row-major-first
/// node). The segment paths partition the edges.
std::vector<Segment> extract_segments(const NetworkGraph& graph);

struct GraphPath {
    Polyline points;
    double length = 0.0;
};

/// Point-level view of a graph for nearest-point and shortest-path queries.
/// Vertices are the distinct polyline points (coinciding coordinates in
/// different edges are the same vertex) plus isolated nodes; neighbouring
/// polyline points are joined with their Euclidean distance as weight.
class GraphIndex {
public:
    explicit GraphIndex(const NetworkGraph& graph);

    bool empty() const { return points_.empty(); }
    std::span<const PixelCoord> points() const { return points_; }
    std::optional<int> find(PixelCoord p) const;

    /// Closest vertex to `q` (ties: row-major). Throws InvalidArgument on an
    /// empty graph.
    std::pair<PixelCoord, double> nearest(PixelCoord q) const;

    /// Dijkstra between two vertices; std::nullopt if they are disconnected.
    /// Vertices in `blocked` (other than a and b) are not entered.
    std::optional<GraphPath> shortest_path(PixelCoord a, PixelCoord b,
                                           const std::vector<PixelCoord>& blocked = {}) const;

private:
    struct Arc {
        int to;
        double weight;
    };
    std::vector<PixelCoord> points_;  // sorted row-major
    std::vector<std::vector<Arc>> arcs_;
};

std::pair<PixelCoord, double> nearest_graph_point(const NetworkGraph& graph, PixelCoord q);

std::optional<GraphPath> graph_shortest_path(const NetworkGraph& graph, PixelCoord a, PixelCoord b);

}  // namespace topotrace
