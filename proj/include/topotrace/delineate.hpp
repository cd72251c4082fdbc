#pragma once

#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "topotrace/connectivity.hpp"
#include "topotrace/graph.hpp"

namespace topotrace {

struct DelineationConfig {
    OracleConfig oracle;
    double tau_conf = 0.5;               ///< detections below this are dropped
    int r_nbhd = 5;                      ///< Chebyshev radius of a visited point's neighbourhood
    std::optional<double> d_restart;     ///< restart distance; defaults to k
    double tau_restart = 0.75;           ///< minimum probability of a restart point
    std::optional<long> max_steps;       ///< pop budget; defaults to 4 * pixels / r_nbhd

    void validate() const;
    double restart_distance() const { return d_restart.value_or(static_cast<double>(oracle.k)); }
    long step_limit(int width, int height) const;
};

/// A point waiting in the exploration bag.
struct ExplorationEntry {
    PixelCoord location;
    double confidence = 0.0;
    PixelCoord precedent;
    long insertion_index = 0;
};

struct TraceReport {
    long steps = 0;          ///< entries popped from the bag
    long restarts = 0;       ///< starts after the first
    long visited = 0;
    long edges = 0;
    long bag_high_water = 0;
    long pushed = 0;
    long discarded = 0;      ///< detections dropped next to their precedent
    long snapped = 0;        ///< detections linked to an existing visited point
    long merged = 0;         ///< popped entries absorbed by a nearby visited point

    friend bool operator==(const TraceReport&, const TraceReport&) = default;
};

struct LinkedPath {
    Polyline points;
    double cost = 0.0;
};

/// Minimum-cost 8-connected path from a to b inside `window`. Entering pixel
/// q costs step * (1 - p(q) + 1e-3) with step 1 or sqrt(2). Equal-cost
/// frontier entries expand in row-major order. Throws InvalidArgument if a
/// or b lies outside the window or the window leaves the map.
LinkedPath link_shortest_path(const ProbabilityMap& probmap, PixelCoord a, PixelCoord b, const Window& window);

/// Window used to link a and b: their bounding box grown by (k-1)/2.
Window link_window(const ProbabilityMap& probmap, PixelCoord a, PixelCoord b, const OracleConfig& cfg);

/// Cost of a pixel path under the link_shortest_path cost model.
double path_cost(const ProbabilityMap& probmap, const Polyline& path);

/// Thrown when the pop budget runs out. Carries everything traced so far.
class MaxStepsExceeded : public Error {
public:
    MaxStepsExceeded(NetworkGraph partial, TraceReport report)
        : Error("delineation exceeded max_steps"), graph(std::move(partial)), report(report) {}
    NetworkGraph graph;
    TraceReport report;
};

/// Iterative best-first delineation over a probability map.
///
/// Single-threaded. The probability map and oracle are only read, so several
/// engines can share them.
class DelineationEngine {
public:
    struct StepView {
        long step;
        PixelCoord point;
        std::optional<PixelCoord> precedent;  ///< empty for start points
        double confidence;                    ///< 1 for start points
        const NetworkGraph& graph;
        const std::vector<PixelCoord>& visited;
        std::size_t bag_size;
    };
    using Observer = std::function<void(const StepView&)>;

    DelineationEngine(const ProbabilityMap& probmap, const ConnectivityOracle& oracle, DelineationConfig cfg);

    /// Called after every visit (starts included), once the visit is linked.
    void set_observer(Observer observer) { observer_ = std::move(observer); }

    /// Runs to completion. Throws MaxStepsExceeded.
    NetworkGraph run();

    /// Next start point: the global argmax on the first call, afterwards the
    /// highest pixel with p >= tau_restart farther than d_restart from every
    /// visited point (ties row-major). std::nullopt when nothing qualifies.
    std::optional<PixelCoord> select_start();

    const TraceReport& report() const { return report_; }
    const NetworkGraph& graph() const { return graph_; }
    const std::vector<PixelCoord>& visited() const { return visited_; }

private:
    struct EntryOrder {
        bool operator()(const ExplorationEntry& a, const ExplorationEntry& b) const {
            if (a.confidence != b.confidence) return a.confidence < b.confidence;
            return a.insertion_index > b.insertion_index;
        }
    };

    void visit(PixelCoord p);
    void notify(PixelCoord p, std::optional<PixelCoord> precedent, double confidence);
    void expand(PixelCoord center, std::optional<PixelCoord> precedent);
    void link(PixelCoord a, PixelCoord b);
    std::optional<PixelCoord> nearest_visited(PixelCoord p, std::optional<PixelCoord> exclude) const;

    const ProbabilityMap& probmap_;
    const ConnectivityOracle& oracle_;
    DelineationConfig cfg_;
    Observer observer_;

    NetworkGraph graph_;
    std::vector<PixelCoord> visited_;
    std::set<PixelCoord> visited_set_;
    std::set<std::pair<PixelCoord, PixelCoord>> linked_;
    BinaryMask covered_;
    std::priority_queue<ExplorationEntry, std::vector<ExplorationEntry>, EntryOrder> bag_;
    long next_insertion_ = 0;
    bool started_ = false;
    TraceReport report_;
};

/// Convenience wrapper; `report` receives the run summary when non-null.
NetworkGraph delineate(const ProbabilityMap& probmap, const ConnectivityOracle& oracle, const DelineationConfig& cfg,
                       TraceReport* report = nullptr);

}  // namespace topotrace
