#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "scenes.hpp"
#include "topotrace/graph_json.hpp"
#include "topotrace/raster.hpp"
#include "topotrace/synth.hpp"

using namespace topotrace;

namespace {

NetworkGraph round_trip(const NetworkGraph& g) { return raster_to_graph(graph_to_raster(g)); }

double segment_total(const std::vector<Segment>& segs) {
    double total = 0.0;
    for (const auto& s : segs) total += s.length;
    return total;
}

NetworkGraph ring(int width, int height) {
    NetworkGraph g(width, height);
    Polyline loop;
    for (int c = 2; c <= 6; ++c) loop.push_back({2, c});
    for (int r = 3; r <= 6; ++r) loop.push_back({r, 6});
    for (int c = 5; c >= 2; --c) loop.push_back({6, c});
    for (int r = 5; r >= 2; --r) loop.push_back({r, 2});
    g.add_edge(loop);
    return g;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("add_edge rejects degenerate edges") {
    NetworkGraph g(5, 5);
    CHECK_THROWS_AS(g.add_edge({{1, 1}}), InvalidArgument);
    CHECK_THROWS_AS(g.add_edge({{1, 1}, {1, 1}}), InvalidArgument);
    g.add_edge({{1, 1}, {1, 2}});
    CHECK(g.nodes().size() == 2);
}

TEST_CASE("raster_to_graph on a straight line") {
    BinaryMask m(12, 3, 0);
    scenes::draw(m, {1, 1}, {1, 10});
    const auto g = raster_to_graph(m);
    CHECK(g.nodes() == std::set<PixelCoord>{{1, 1}, {1, 10}});
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges()[0].size() == 10);
}

TEST_CASE("raster_to_graph on a cross") {
    const auto g = raster_to_graph(scenes::cross(11, 11, {5, 5}));
    CHECK(g.nodes().size() == 5);
    CHECK(g.nodes().count({5, 5}) == 1);
    CHECK(g.edges().size() == 4);
    for (const auto& [node, deg] : g.node_degrees()) CHECK(deg == (node == PixelCoord{5, 5} ? 4 : 1));
}

TEST_CASE("raster_to_graph on an empty mask") { CHECK(raster_to_graph(BinaryMask(6, 6, 0)).empty()); }

TEST_CASE("raster_to_graph keeps isolated pixels and anchors cycles") {
    const auto m = scenes::mask_from_rows(
        {"#.......", "....#...", "...#.#..", "..#...#.", "...#.#..", "....#..."});
    const auto g = raster_to_graph(m);
    CHECK(g.nodes() == std::set<PixelCoord>{{0, 0}, {1, 4}});
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges()[0].front() == PixelCoord{1, 4});
    CHECK(g.edges()[0].back() == PixelCoord{1, 4});
    CHECK(g.edges()[0].size() == 9);
}

TEST_CASE("raster_to_graph covers every skeleton pixel") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto skel = skeletonize(generate_network(scenes::scene_params(seed, 2, 0.3)).mask);
        const auto g = raster_to_graph(skel);
        BinaryMask seen(skel.width(), skel.height(), 0);
        for (const auto& n : g.nodes()) seen[n] = 1;
        for (const auto& e : g.edges()) {
            CHECK(oracles::is_king_path(e));
            for (const auto& p : e) seen[p] = 1;
        }
        CHECK(seen == skel);
    }
}

TEST_CASE("graph_to_raster examples") {
    CHECK(count_true(graph_to_raster(NetworkGraph(5, 5), 5, 5)) == 0);
    NetworkGraph g(6, 6);
    g.add_edge({{0, 0}, {0, 4}});
    const auto m = graph_to_raster(g, 6, 6);
    CHECK(true_pixels(m) == std::vector<PixelCoord>{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}});
}

TEST_CASE("graph_to_raster names the offending edge") {
    NetworkGraph g(10, 10);
    g.add_edge({{0, 0}, {0, 4}});
    g.add_edge({{1, 1}, {1, 9}});
    try {
        graph_to_raster(g, 6, 6);
        FAIL("expected an exception");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("edge 1") != std::string::npos);
    }
}

TEST_CASE("cross survives the raster round trip") {
    const auto g = raster_to_graph(scenes::cross(11, 11, {5, 5}));
    const auto back = round_trip(g);
    CHECK(back.nodes().size() == 5);
    CHECK(back.edges().size() == 4);
    CHECK(back == g);
}

TEST_CASE("raster round trip reaches a fixed point after one pass") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CAPTURE(seed);
        const auto scene = generate_network(scenes::scene_params(seed, 1 + seed % 2, 0.25));
        const auto once = round_trip(scene.graph);
        CHECK(round_trip(once) == once);
    }
}

TEST_CASE("extract_segments examples") {
    CHECK(extract_segments(NetworkGraph(4, 4)).empty());
    CHECK(extract_segments(scenes::y_graph()).size() == 3);

    const auto line = scenes::graph_of(12, 3, {{{1, 1}, {1, 10}}});
    const auto segs = extract_segments(line);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].length == doctest::Approx(9.0));
    CHECK_FALSE(segs[0].closed());

    CHECK(extract_segments(raster_to_graph(scenes::cross(11, 11, {5, 5}))).size() == 4);
}

TEST_CASE("extract_segments walks through degree-two nodes") {
    NetworkGraph g(20, 3);
    g.add_edge(bresenham_line({1, 0}, {1, 5}));
    g.add_edge(bresenham_line({1, 5}, {1, 12}));
    g.add_edge(bresenham_line({1, 12}, {1, 19}));
    const auto segs = extract_segments(g);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].length == doctest::Approx(19.0));
    CHECK(segs[0].path.size() == 20);
}

TEST_CASE("extract_segments turns a ring into one closed segment") {
    const auto segs = extract_segments(ring(9, 9));
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].closed());
    CHECK(segs[0].start == PixelCoord{2, 2});
    CHECK(segs[0].length == doctest::Approx(16.0));
}

TEST_CASE("segments partition the graph length") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CAPTURE(seed);
        const auto g = generate_network(scenes::scene_params(seed, 2, 0.3)).graph;
        const auto segs = extract_segments(g);
        CHECK(segment_total(segs) == doctest::Approx(g.total_length()).epsilon(1e-6));
        for (const auto& s : segs) {
            CHECK(s.length > 0.0);
            CHECK(s.path.front() == s.start);
            CHECK(s.path.back() == s.end);
        }
    }
}

TEST_CASE("shortest path along a segment has the segment's length") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = generate_network(scenes::scene_params(seed, 1, 0.3)).graph;
        for (const auto& s : extract_segments(g)) {
            if (s.closed()) continue;
            const auto path = graph_shortest_path(g, s.start, s.end);
            REQUIRE(path.has_value());
            CHECK(path->length == doctest::Approx(s.length).epsilon(1e-9));
        }
    }
}

TEST_CASE("nearest_graph_point examples") {
    const auto g = scenes::graph_of(10, 10, {{{0, 0}, {0, 9}}});
    CHECK(nearest_graph_point(g, {0, 4}) == std::pair<PixelCoord, double>{{0, 4}, 0.0});
    const auto [p, d] = nearest_graph_point(g, {3, 2});
    CHECK(p == PixelCoord{0, 2});
    CHECK(d == doctest::Approx(3.0));
    CHECK_THROWS_AS(nearest_graph_point(NetworkGraph(4, 4), {0, 0}), InvalidArgument);
}

TEST_CASE("nearest_graph_point breaks ties in row-major order") {
    const auto g = scenes::graph_of(10, 10, {{{2, 0}, {2, 9}}, {{6, 0}, {6, 9}}});
    CHECK(nearest_graph_point(g, {4, 5}).first == PixelCoord{2, 5});
}

TEST_CASE("graph_shortest_path examples") {
    const auto g = scenes::graph_of(12, 12, {{{0, 0}, {0, 9}}, {{5, 0}, {5, 4}}});
    const auto self = graph_shortest_path(g, {0, 3}, {0, 3});
    REQUIRE(self.has_value());
    CHECK(self->points == Polyline{{0, 3}});
    CHECK(self->length == 0.0);

    const auto along = graph_shortest_path(g, {0, 0}, {0, 9});
    REQUIRE(along.has_value());
    CHECK(along->length == doctest::Approx(9.0));

    CHECK_FALSE(graph_shortest_path(g, {0, 0}, {5, 0}).has_value());
    CHECK_THROWS_AS(graph_shortest_path(g, {3, 3}, {0, 0}), InvalidArgument);
}

TEST_CASE("graph queries are deterministic") {
    const auto g = generate_network(scenes::scene_params(3, 2, 0.3)).graph;
    CHECK(graph_to_json(raster_to_graph(graph_to_raster(g))) == graph_to_json(raster_to_graph(graph_to_raster(g))));
    const auto a = extract_segments(g);
    const auto b = extract_segments(g);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].path == b[i].path);
}

}  // TEST_SUITE
