#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "scenes.hpp"
#include "topotrace/cli.hpp"
#include "topotrace/graph_json.hpp"
#include "topotrace/pgm.hpp"
#include "topotrace/raster.hpp"

using namespace topotrace;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("topotrace_cli_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    args.insert(args.begin(), "topotrace");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen writes the four artefacts and matches the golden graph") {
    TempDir dir("gen");
    const auto r = call({"gen", "--seed", "20240601", "--branch-prob", "0.2", "--out-dir", dir.path.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    for (const char* name : {"gt_graph.json", "gt_mask.pgm", "probmap.pgm", "params.json"})
        CHECK(fs::exists(dir.path / name));
    CHECK(slurp(dir / "gt_graph.json") == slurp(TOPOTRACE_GOLDEN_DIR "/synth_seed20240601_branch0.2.json"));
    const auto params = json::parse(slurp(dir / "params.json"));
    CHECK(params["seed"] == 20240601);
    CHECK(params["branch_prob"] == 0.2);
    const auto summary = json::parse(r.out);
    const auto graph = read_graph_json(dir / "gt_graph.json");
    CHECK(summary["nodes"] == graph.nodes().size());
    CHECK(summary["edges"] == graph.edges().size());
    CHECK(summary["pixels"] == count_true(read_mask_pgm(dir / "gt_mask.pgm")));
}

TEST_CASE("gen is deterministic and honours --components") {
    TempDir a("gen_a"), b("gen_b");
    const std::vector<std::string> common{"gen", "--seed", "1", "--components", "2", "--blur-radius", "1",
                                          "--noise-amp", "0.1", "--gap-count", "2", "--clutter-count", "2"};
    auto args_a = common, args_b = common;
    args_a.insert(args_a.end(), {"--out-dir", a.path.string()});
    args_b.insert(args_b.end(), {"--out-dir", b.path.string()});
    REQUIRE(call(args_a).code == 0);
    REQUIRE(call(args_b).code == 0);
    for (const char* name : {"gt_graph.json", "gt_mask.pgm", "probmap.pgm", "params.json"})
        CHECK(slurp(a / name) == slurp(b / name));
    CHECK(count_components(read_mask_pgm(a / "gt_mask.pgm")) == 2);
}

TEST_CASE("gen reports usage errors with exit code 2") {
    TempDir dir("gen_err");
    auto r = call({"gen", "--out-dir", dir / "missing"});
    CHECK(r.code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(call({"gen", "--width", "-4", "--out-dir", dir.path.string()}).code == 2);
    CHECK(call({"gen", "--seed", "banana", "--out-dir", dir.path.string()}).code == 2);
    CHECK(call({"gen"}).code == 2);
    CHECK(call({}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
}

TEST_CASE("help exits cleanly") { CHECK(call({"--help"}).code == 0); }

TEST_CASE("trace recovers a clean scene with the ground-truth oracle") {
    TempDir dir("trace");
    REQUIRE(call({"gen", "--seed", "3", "--out-dir", dir.path.string()}).code == 0);
    const auto r = call({"trace", "--probmap", dir / "probmap.pgm", "--oracle", "gt:" + (dir / "gt_mask.pgm"),
                         "--out", dir / "pred.json", "--report", dir / "report.json"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto report = json::parse(r.out);
    CHECK(report["edges"].get<long>() >= 1);
    CHECK(report["restarts"] == 0);
    CHECK(json::parse(slurp(dir / "report.json")) == report);
    const auto e = call({"eval", "--pred", dir / "pred.json", "--gt", dir / "gt_graph.json"});
    REQUIRE(e.code == 0);
    const auto metrics = json::parse(e.out);
    CHECK(metrics["C"].get<double>() >= 0.95);
    CHECK(metrics["P"].get<double>() >= 0.95);
}

TEST_CASE("trace output is byte-identical across runs") {
    TempDir dir("trace_rep");
    REQUIRE(call({"gen", "--seed", "5", "--blur-radius", "1", "--out-dir", dir.path.string()}).code == 0);
    const auto a = call({"trace", "--probmap", dir / "probmap.pgm", "--out", dir / "a.json"});
    const auto b = call({"trace", "--probmap", dir / "probmap.pgm", "--out", dir / "b.json"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
}

TEST_CASE("trace of an empty map yields an empty graph") {
    TempDir dir("trace_empty");
    write_probability_pgm(dir / "zero.pgm", ProbabilityMap(40, 30, 0.0));
    const auto r = call({"trace", "--probmap", dir / "zero.pgm", "--out", dir / "g.json"});
    REQUIRE(r.code == 0);
    const auto g = read_graph_json(dir / "g.json");
    CHECK(g.empty());
    CHECK(g.width() == 40);
    CHECK(g.height() == 30);
    CHECK(json::parse(r.out)["steps"] == 0);
}

TEST_CASE("trace stops at max_steps with exit 3 and keeps the partial graph") {
    TempDir dir("trace_cap");
    REQUIRE(call({"gen", "--seed", "2", "--out-dir", dir.path.string()}).code == 0);
    const auto r = call({"trace", "--probmap", dir / "probmap.pgm", "--oracle", "gt:" + (dir / "gt_mask.pgm"),
                         "--max-steps", "1", "--out", dir / "g.json"});
    CHECK(r.code == 3);
    CHECK(r.err.find("error:") != std::string::npos);
    REQUIRE(fs::exists(dir / "g.json"));
    CHECK(json::parse(r.out)["steps"] == 1);
    CHECK(read_graph_json(dir / "g.json").edges().size() <= 1);
}

TEST_CASE("trace writes snapshots and rejects bad inputs") {
    TempDir dir("trace_snap");
    BinaryMask mask = scenes::blank(20, 12);
    scenes::draw(mask, {6, 1}, {6, 18});
    write_probability_pgm(dir / "line.pgm", to_probability(mask));
    fs::create_directories(dir.path / "snaps");
    const auto r = call({"trace", "--probmap", dir / "line.pgm", "--k", "9", "--s", "7", "--out", dir / "g.json",
                         "--snapshots", dir / "snaps", "--verbose"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(dir.path / "snaps" / "step_000001.pgm"));
    CHECK(r.err.find("visit") != std::string::npos);

    CHECK(call({"trace", "--probmap", dir / "nope.pgm", "--out", dir / "g.json"}).code == 2);
    CHECK(call({"trace", "--probmap", dir / "line.pgm", "--oracle", "magic", "--out", dir / "g.json"}).code == 2);
    CHECK(call({"trace", "--probmap", dir / "line.pgm", "--k", "10", "--out", dir / "g.json"}).code == 2);
    std::ofstream(dir / "junk.pgm") << "P2 garbage";
    CHECK(call({"trace", "--probmap", dir / "junk.pgm", "--out", dir / "g.json"}).code == 2);
}

TEST_CASE("eval of a graph against itself is perfect") {
    TempDir dir("eval_self");
    REQUIRE(call({"gen", "--seed", "4", "--out-dir", dir.path.string()}).code == 0);
    const auto r = call({"eval", "--pred", dir / "gt_graph.json", "--gt", dir / "gt_graph.json", "--segments-csv",
                         dir / "segments.csv"});
    REQUIRE(r.code == 0);
    const auto m = json::parse(r.out);
    for (const char* key : {"P", "R", "C", "F_R", "F_C"}) CHECK(m[key].get<double>() == 1.0);
    CHECK(m["segments_ok"] == m["segments_total"]);
    const auto csv = slurp(dir / "segments.csv");
    CHECK(csv.rfind("index,start_row", 0) == 0);
    CHECK(static_cast<long>(std::count(csv.begin(), csv.end(), '\n')) == m["segments_total"].get<long>() + 1);
}

TEST_CASE("eval reproduces precision 0.835 and connectivity 0.671") {
    TempDir dir("eval_pc");
    const auto scene = scenes::precision_connectivity_scene();
    write_graph_json(dir / "pred.json", scene.pred);
    write_graph_json(dir / "gt.json", scene.gt);
    const auto r = call({"eval", "--pred", dir / "pred.json", "--gt", dir / "gt.json"});
    REQUIRE(r.code == 0);
    const auto m = json::parse(r.out);
    CHECK(m["P"].get<double>() == doctest::Approx(2077.0 / 2487.0));
    CHECK(m["C"].get<double>() == doctest::Approx(47.0 / 70.0));
    CHECK(m["P"].get<double>() == doctest::Approx(0.835).epsilon(0.001));
    CHECK(m["C"].get<double>() == doctest::Approx(0.671).epsilon(0.001));
    CHECK(m["F_C"].get<double>() == doctest::Approx(0.744).epsilon(0.001));
    const auto serial = call({"eval", "--serial", "--pred", dir / "pred.json", "--gt", dir / "gt.json"});
    CHECK(serial.out == r.out);
}

TEST_CASE("eval accepts masks and rejects mismatched sizes") {
    TempDir dir("eval_mask");
    BinaryMask mask = scenes::blank(30, 20);
    scenes::draw(mask, {10, 2}, {10, 27});
    write_mask_pgm(dir / "a.pgm", mask);
    const auto r = call({"eval", "--pred", dir / "a.pgm", "--gt", dir / "a.pgm"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["C"].get<double>() == 1.0);
    write_mask_pgm(dir / "b.pgm", scenes::blank(31, 20));
    CHECK(call({"eval", "--pred", dir / "a.pgm", "--gt", dir / "b.pgm"}).code == 2);
    std::ofstream(dir / "bad.json") << "{\"width\": 3}";
    CHECK(call({"eval", "--pred", dir / "bad.json", "--gt", dir / "a.pgm"}).code == 2);
}

TEST_CASE("patch-gt exports locations and heatmaps") {
    TempDir dir("patch");
    BinaryMask mask = scenes::blank(15, 15);
    scenes::draw(mask, {7, 0}, {7, 14});
    write_mask_pgm(dir / "line.pgm", mask);
    fs::create_directories(dir.path / "heat");
    const auto r = call({"patch-gt", "--mask", dir / "line.pgm", "--k", "9", "--s", "7", "--center", "7,7",
                         "--heatmap-dir", dir / "heat"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = json::parse(r.out);
    CHECK(j["k"] == 9);
    CHECK(j["s"] == 7);
    REQUIRE(j["patches"].size() == 1);
    CHECK(j["patches"][0]["center"] == json::array({7, 7}));
    CHECK(j["patches"][0]["locations"] == json::parse("[[7,4],[7,10]]"));
    CHECK(fs::exists(dir.path / "heat" / "patch_0000.pgm"));

    CHECK(call({"patch-gt", "--mask", dir / "line.pgm", "--center", "0,0"}).code == 2);
    CHECK(call({"patch-gt", "--mask", dir / "line.pgm", "--center", "7;7"}).code == 2);
    CHECK(call({"patch-gt", "--mask", dir / "line.pgm"}).code == 2);
}

TEST_CASE("patch-gt sampling stays on the structure") {
    TempDir dir("patch_sample");
    REQUIRE(call({"gen", "--seed", "8", "--out-dir", dir.path.string()}).code == 0);
    const auto r = call({"patch-gt", "--mask", dir / "gt_mask.pgm", "--sample", "130", "--seed", "11", "--out",
                         dir / "patches.json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto j = json::parse(slurp(dir / "patches.json"));
    const BinaryMask mask = read_mask_pgm(dir / "gt_mask.pgm");
    CHECK(j["patches"].size() == std::min<std::size_t>(130, count_true(skeletonize(mask))));
    for (const auto& p : j["patches"]) {
        CHECK(mask(p["center"][0].get<int>(), p["center"][1].get<int>()));
        for (const auto& l : p["locations"]) CHECK(mask(l[0].get<int>(), l[1].get<int>()));
    }
}

TEST_CASE("render overlays a graph or passes the map through") {
    TempDir dir("render");
    REQUIRE(call({"gen", "--seed", "6", "--out-dir", dir.path.string()}).code == 0);
    const ProbabilityMap probmap = read_probability_pgm(dir / "probmap.pgm");
    write_graph_json(dir / "empty.json", NetworkGraph(probmap.width(), probmap.height()));
    REQUIRE(call({"render", "--probmap", dir / "probmap.pgm", "--graph", dir / "empty.json", "--out",
                  dir / "same.pgm"})
                .code == 0);
    CHECK(slurp(dir / "same.pgm") == slurp(dir / "probmap.pgm"));

    REQUIRE(call({"render", "--probmap", dir / "probmap.pgm", "--graph", dir / "gt_graph.json", "--out",
                  dir / "over.ppm"})
                .code == 0);
    CHECK(slurp(dir / "over.ppm").rfind("P6", 0) == 0);
    REQUIRE(call({"render", "--probmap", dir / "probmap.pgm", "--graph", dir / "gt_graph.json", "--out",
                  dir / "over.pgm"})
                .code == 0);
    const ByteImage over = read_pgm(dir / "over.pgm");
    const BinaryMask drawn = read_mask_pgm(dir / "gt_mask.pgm");
    for (std::size_t i = 0; i < drawn.size(); ++i)
        if (drawn.values()[i]) CHECK(over.values()[i] == 255);

    write_graph_json(dir / "small.json", NetworkGraph(3, 3));
    CHECK(call({"render", "--probmap", dir / "probmap.pgm", "--graph", dir / "small.json", "--out",
                dir / "x.pgm"})
              .code == 2);
}

TEST_CASE("config files feed every subcommand and flags override them") {
    TempDir dir("config");
    std::ofstream(dir / "run.cfg") << "# scene\nseed = 9\nwidth = 96\nheight = 80\nstep_len = 6\n";
    REQUIRE(call({"gen", "--config", dir / "run.cfg", "--out-dir", dir.path.string()}).code == 0);
    auto params = json::parse(slurp(dir / "params.json"));
    CHECK(params["seed"] == 9);
    CHECK(params["width"] == 96);

    REQUIRE(call({"gen", "--config", dir / "run.cfg", "--width", "64", "--out-dir", dir.path.string()}).code == 0);
    params = json::parse(slurp(dir / "params.json"));
    CHECK(params["width"] == 64);
    CHECK(params["height"] == 80);

    std::ofstream(dir / "bad.cfg") << "colour = red\n";
    CHECK(call({"gen", "--config", dir / "bad.cfg", "--out-dir", dir.path.string()}).code == 2);
    CHECK(call({"gen", "--config", dir / "absent.cfg", "--out-dir", dir.path.string()}).code == 2);
}

}  // TEST_SUITE
