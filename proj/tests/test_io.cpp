#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "scenes.hpp"
#include "topotrace/graph_json.hpp"
#include "topotrace/pgm.hpp"

using namespace topotrace;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("topotrace_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ByteImage parse(const std::string& bytes) {
    std::istringstream in(bytes);
    return read_pgm(in);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("PGM round trip preserves every byte") {
    ByteImage img(5, 3, 0);
    for (std::size_t i = 0; i < img.size(); ++i) img.values()[i] = static_cast<std::uint8_t>(i * 17);
    std::ostringstream out;
    write_pgm(out, img);
    CHECK(out.str().rfind("P5\n5 3\n255\n", 0) == 0);
    CHECK(parse(out.str()) == img);
}

TEST_CASE("PGM header comments are skipped") {
    const std::string data = std::string("P5\n# made by hand\n2 1\n# max\n255\n") + char(10) + char(200);
    const auto img = parse(data);
    CHECK(img.width() == 2);
    CHECK(img(0, 0) == 10);
    CHECK(img(0, 1) == 200);
}

TEST_CASE("malformed PGM files are rejected") {
    CHECK_THROWS_AS(parse("P2\n1 1\n255\n0"), FormatError);
    CHECK_THROWS_AS(parse("P5\n2 2\n65535\n"), FormatError);
    CHECK_THROWS_AS(parse("P5\n2 2\n255\nab"), FormatError);
    CHECK_THROWS_AS(parse("P5\nx 2\n255\n"), FormatError);
    CHECK_THROWS_AS(parse("P5\n0 2\n255\n"), FormatError);
    CHECK_THROWS_AS(read_pgm(fs::path("/nonexistent/file.pgm")), FormatError);
}

TEST_CASE("byte conversions follow the fixed scaling") {
    ByteImage img(4, 1, 0);
    img(0, 1) = 127;
    img(0, 2) = 128;
    img(0, 3) = 255;
    const auto prob = bytes_to_probability(img);
    CHECK(prob(0, 1) == 127.0 / 255.0);
    CHECK(prob(0, 3) == 1.0);
    const auto mask = bytes_to_mask(img);
    CHECK(mask(0, 1) == 0);
    CHECK(mask(0, 2) == 1);
    CHECK(probability_to_bytes(prob) == img);
    CHECK(mask_to_bytes(mask)(0, 2) == 255);
}

TEST_CASE("probability PGM files round trip exactly at byte resolution") {
    const auto dir = scratch_dir("prob");
    ProbabilityMap map(3, 2, 0.0);
    for (std::size_t i = 0; i < map.size(); ++i) map.values()[i] = static_cast<double>(i * 40) / 255.0;
    write_probability_pgm(dir / "p.pgm", map);
    CHECK(read_probability_pgm(dir / "p.pgm") == map);
    CHECK_FALSE(fs::exists(dir / "p.pgm.tmp"));
}

TEST_CASE("atomic writes need an existing directory") {
    CHECK_THROWS_AS(write_file_atomic("/nonexistent_dir_xyz/out.txt", "x"), InvalidArgument);
}

TEST_CASE("graph JSON round trip") {
    auto g = scenes::y_graph();
    g.add_node({0, 0});
    const auto text = graph_to_json(g);
    CHECK(graph_from_json(text) == g);
    CHECK(graph_to_json(graph_from_json(text)) == text);

    const auto dir = scratch_dir("json");
    write_graph_json(dir / "g.json", g);
    CHECK(read_graph_json(dir / "g.json") == g);
}

TEST_CASE("graph JSON layout") {
    NetworkGraph g(4, 3);
    g.add_edge({{0, 0}, {0, 1}});
    CHECK(graph_to_json(g) ==
          "{\"width\":4,\"height\":3,\"nodes\":[[0,0],[0,1]],\"edges\":[{\"points\":[[0,0],[0,1]]}]}\n");
}

TEST_CASE("invalid graph JSON is rejected") {
    CHECK_THROWS_AS(graph_from_json("not json"), FormatError);
    CHECK_THROWS_AS(graph_from_json("{\"width\":4}"), FormatError);
    CHECK_THROWS_AS(graph_from_json("{\"width\":4,\"height\":4,\"nodes\":[[9,0]],\"edges\":[]}"), FormatError);
    CHECK_THROWS_AS(graph_from_json("{\"width\":4,\"height\":4,\"nodes\":[],\"edges\":[{\"points\":[[0,0]]}]}"),
                    FormatError);
    CHECK_THROWS_AS(graph_from_json("{\"width\":4,\"height\":4,\"nodes\":[[0,\"a\"]],\"edges\":[]}"), FormatError);
}

}  // TEST_SUITE
