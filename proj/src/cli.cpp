#include "topotrace/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <map>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "topotrace/config.hpp"
#include "topotrace/graph_json.hpp"
#include "topotrace/pgm.hpp"
#include "topotrace/raster.hpp"

namespace topotrace::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

const std::map<std::string, std::string> kKeyHelp{
    {"k", "Patch side (odd)"},
    {"s", "Border square side (odd, < k)"},
    {"tau_occupancy", "Foreground threshold of the probability-map oracle"},
    {"tau_conf", "Minimum detection confidence"},
    {"r_nbhd", "Visited-neighbourhood radius (px)"},
    {"d_restart", "Minimum restart distance from visited points (default k)"},
    {"tau_restart", "Minimum probability of a restart point"},
    {"max_steps", "Safety bound on exploration steps (default 4*w*h/r_nbhd)"},
    {"d_match", "Pixel matching distance for precision/recall"},
    {"connectivity_ratio", "Length ratio a segment must exceed"},
    {"d_near", "Maximum distance from a segment end to the prediction"},
    {"symmetric_ratio", "Use min/max of the two lengths"},
    {"seed", "Random seed"},
    {"width", "Scene width"},
    {"height", "Scene height"},
    {"n_seeds", "Arms grown from each component root"},
    {"branch_prob", "Branching probability per step"},
    {"step_len", "Walk step length (px)"},
    {"n_components", "Number of disjoint components"},
    {"max_branches", "Branch budget per component"},
    {"max_branch_depth", "Maximum branch nesting"},
    {"blur_radius", "Box blur radius"},
    {"noise_amp", "Uniform noise amplitude"},
    {"gap_count", "Number of gaps carved along the structure"},
    {"gap_len", "Gap length (px)"},
    {"clutter_count", "Number of off-structure strokes"},
    {"sigma", "Heatmap Gaussian sigma for patch exports"},
};

struct ConfigOptions {
    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "Flat key=value config file")->check(CLI::ExistingFile);
        for (const auto& key : config_keys()) {
            std::string names = "--" + dashed(key);
            if (key == "n_components") names += ",--components";
            const auto help = kKeyHelp.find(key);
            options[key] = app->add_option(names, values[key], help == kKeyHelp.end() ? "" : help->second)
                               ->type_name("VALUE")
                               ->group("Config overrides");
        }
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) apply_config(cfg, read_config(config_path));
        ConfigValues overrides;
        for (const auto& [key, opt] : options)
            if (opt->count() > 0) overrides[key] = values.at(key);
        apply_config(cfg, overrides);
        cfg.validate();
        return cfg;
    }
};

void require_directory(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InvalidArgument("output directory " + dir.string() + " does not exist");
}

bool looks_like_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    return in.gcount() == 2 && magic[0] == 'P' && magic[1] == '5';
}

NetworkGraph load_graph_or_mask(const fs::path& path) {
    if (looks_like_pgm(path)) return raster_to_graph(skeletonize(read_mask_pgm(path)));
    return read_graph_json(path);
}

ByteImage overlay(const ProbabilityMap& probmap, const NetworkGraph& graph, bool dim) {
    ByteImage image = probability_to_bytes(probmap);
    if (graph.empty()) return image;
    if (dim)
        for (auto& v : image.values()) v = static_cast<std::uint8_t>(v / 2);
    const BinaryMask drawn = graph_to_raster(graph, probmap.width(), probmap.height());
    for (std::size_t i = 0; i < drawn.size(); ++i)
        if (drawn.values()[i]) image.values()[i] = 255;
    return image;
}

RgbImage colour_overlay(const ProbabilityMap& probmap, const NetworkGraph& graph) {
    const ByteImage gray = probability_to_bytes(probmap);
    RgbImage image{gray, gray, gray};
    const BinaryMask drawn = graph_to_raster(graph, probmap.width(), probmap.height());
    for (std::size_t i = 0; i < drawn.size(); ++i)
        if (drawn.values()[i]) {
            image.r.values()[i] = 255;
            image.g.values()[i] = 0;
            image.b.values()[i] = 0;
        }
    for (const auto& node : graph.nodes()) {
        image.r[node] = 0;
        image.g[node] = 255;
        image.b[node] = 0;
    }
    return image;
}

ordered_json report_json(const TraceReport& r) {
    ordered_json j;
    j["steps"] = r.steps;
    j["restarts"] = r.restarts;
    j["visited"] = r.visited;
    j["edges"] = r.edges;
    j["bag_high_water"] = r.bag_high_water;
    j["pushed"] = r.pushed;
    j["discarded"] = r.discarded;
    j["snapped"] = r.snapped;
    j["merged"] = r.merged;
    return j;
}

ordered_json params_json(const SynthParams& p) {
    ordered_json j;
    j["seed"] = p.seed;
    j["width"] = p.width;
    j["height"] = p.height;
    j["n_seeds"] = p.n_seeds;
    j["branch_prob"] = p.branch_prob;
    j["step_len"] = p.step_len;
    j["n_components"] = p.n_components;
    j["max_branches"] = p.max_branches;
    j["max_branch_depth"] = p.max_branch_depth;
    j["blur_radius"] = p.corruption.blur_radius;
    j["noise_amp"] = p.corruption.noise_amp;
    j["gap_count"] = p.corruption.gap_count;
    j["gap_len"] = p.corruption.gap_len;
    j["clutter_count"] = p.corruption.clutter_count;
    return j;
}

PixelCoord parse_center(const std::string& text) {
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) throw std::invalid_argument(text);
        std::size_t used_r = 0, used_c = 0;
        const std::string rs = text.substr(0, comma), cs = text.substr(comma + 1);
        const int r = std::stoi(rs, &used_r);
        const int c = std::stoi(cs, &used_c);
        if (used_r != rs.size() || used_c != cs.size()) throw std::invalid_argument(text);
        return {r, c};
    } catch (const std::exception&) {
        throw InvalidArgument("center must be ROW,COL, got '" + text + "'");
    }
}

// ------------------------------------------------------------------ gen

struct GenArgs {
    ConfigOptions config;
    std::string out_dir;
};

int cmd_gen(const GenArgs& args, std::ostream& out) {
    const RunConfig cfg = args.config.resolve();
    const fs::path dir(args.out_dir);
    require_directory(dir);
    const SynthScene scene = generate_network(cfg.synth);
    const ProbabilityMap probmap = corrupt(scene.mask, cfg.synth);
    write_graph_json(dir / "gt_graph.json", scene.graph);
    write_mask_pgm(dir / "gt_mask.pgm", scene.mask);
    write_probability_pgm(dir / "probmap.pgm", probmap);
    write_file_atomic(dir / "params.json", params_json(cfg.synth).dump(2) + "\n");

    ordered_json j;
    j["nodes"] = scene.graph.nodes().size();
    j["edges"] = scene.graph.edges().size();
    j["pixels"] = count_true(scene.mask);
    out << j.dump() << "\n";
    return kSuccess;
}

// ---------------------------------------------------------------- trace

struct TraceArgs {
    ConfigOptions config;
    std::string probmap;
    std::string oracle = "probmap";
    std::string out;
    std::string report;
    std::string snapshots;
    int snapshot_every = 1;
    bool verbose = false;
};

int cmd_trace(const TraceArgs& args, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = args.config.resolve();
    if (args.snapshot_every < 1) throw InvalidArgument("--snapshot-every must be >= 1");
    require_directory(fs::absolute(args.out).parent_path());
    if (!args.report.empty()) require_directory(fs::absolute(args.report).parent_path());
    if (!args.snapshots.empty()) require_directory(args.snapshots);

    const ProbabilityMap probmap = read_probability_pgm(args.probmap);
    std::unique_ptr<ConnectivityOracle> oracle;
    if (args.oracle == "probmap") {
        oracle = std::make_unique<ProbabilityMapOracle>(probmap, cfg.delineation.oracle);
    } else if (args.oracle.rfind("gt:", 0) == 0) {
        const BinaryMask mask = read_mask_pgm(args.oracle.substr(3));
        if (!mask.same_shape(probmap)) throw InvalidArgument("oracle mask and probability map differ in size");
        oracle = std::make_unique<GroundTruthOracle>(skeletonize(mask), cfg.delineation.oracle);
    } else {
        throw InvalidArgument("--oracle must be 'probmap' or 'gt:<mask.pgm>', got '" + args.oracle + "'");
    }

    DelineationEngine engine(probmap, *oracle, cfg.delineation);
    long visits = 0;
    engine.set_observer([&](const DelineationEngine::StepView& view) {
        ++visits;
        if (args.verbose) err << "step " << view.step << " visit " << to_string(view.point) << "\n";
        if (!args.snapshots.empty() && visits % args.snapshot_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "step_%06ld.pgm", visits);
            std::ostringstream buf;
            write_pgm(buf, overlay(probmap, view.graph, true));
            write_file_atomic(fs::path(args.snapshots) / name, buf.str());
        }
    });

    auto finish = [&](const NetworkGraph& graph, const TraceReport& report) {
        write_graph_json(args.out, graph);
        const std::string line = report_json(report).dump();
        if (!args.report.empty()) write_file_atomic(args.report, line + "\n");
        out << line << "\n";
    };
    try {
        const NetworkGraph graph = engine.run();
        finish(graph, engine.report());
    } catch (const MaxStepsExceeded& e) {
        finish(e.graph, e.report);
        err << "error: " << e.what() << " (" << e.report.steps << " steps); partial graph written to " << args.out
            << "\n";
        return kSafetyStop;
    }
    return kSuccess;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
    ConfigOptions config;
    std::string pred;
    std::string gt;
    std::string segments_csv;
    bool serial = false;
};

int cmd_eval(const EvalArgs& args, std::ostream& out) {
    RunConfig cfg = args.config.resolve();
    if (args.serial) cfg.eval.parallel = false;
    if (!args.segments_csv.empty()) require_directory(fs::absolute(args.segments_csv).parent_path());
    const NetworkGraph pred = load_graph_or_mask(args.pred);
    const NetworkGraph gt = load_graph_or_mask(args.gt);
    const EvalResult result = evaluate(pred, gt, cfg.eval);

    if (!args.segments_csv.empty()) {
        std::ostringstream csv;
        csv << "index,start_row,start_col,end_row,end_col,gt_length,pred_length,ratio,ok,reason\n";
        for (std::size_t i = 0; i < result.segments.size(); ++i) {
            const auto& s = result.segments[i];
            csv << i << ',' << s.start.row << ',' << s.start.col << ',' << s.end.row << ',' << s.end.col << ','
                << s.gt_length << ',';
            if (s.pred_length) csv << *s.pred_length;
            csv << ',' << s.ratio << ',' << (s.ok ? 1 : 0) << ',' << s.reason << '\n';
        }
        write_file_atomic(args.segments_csv, csv.str());
    }

    ordered_json j;
    j["P"] = result.precision;
    j["R"] = result.recall;
    j["C"] = result.connectivity;
    j["F_R"] = result.f_r;
    j["F_C"] = result.f_c;
    j["segments_total"] = result.segments_total;
    j["segments_ok"] = result.segments_ok;
    out << j.dump() << "\n";
    return kSuccess;
}

// ------------------------------------------------------------- patch-gt

struct PatchArgs {
    ConfigOptions config;
    std::string mask;
    std::vector<std::string> centers;
    int sample = 0;
    std::string heatmap_dir;
    std::string out;
};

int cmd_patch_gt(const PatchArgs& args, std::ostream& out) {
    const RunConfig cfg = args.config.resolve();
    const OracleConfig& oc = cfg.delineation.oracle;
    if (args.centers.empty() && args.sample <= 0) throw InvalidArgument("give --center or --sample");
    if (args.sample < 0) throw InvalidArgument("--sample must be >= 0");
    if (!args.heatmap_dir.empty()) require_directory(args.heatmap_dir);
    if (!args.out.empty()) require_directory(fs::absolute(args.out).parent_path());

    const BinaryMask skeleton = skeletonize(read_mask_pgm(args.mask));
    std::vector<PixelCoord> centers;
    for (const auto& text : args.centers) {
        const PixelCoord c = parse_center(text);
        if (!skeleton.contains(c)) throw InvalidArgument("center " + to_string(c) + " outside the mask");
        centers.push_back(c);
    }
    if (args.sample > 0) {
        const auto sampled = sample_patch_centers(skeleton, static_cast<std::size_t>(args.sample), cfg.synth.seed);
        centers.insert(centers.end(), sampled.begin(), sampled.end());
    }

    ordered_json patches = ordered_json::array();
    for (std::size_t i = 0; i < centers.size(); ++i) {
        PatchSample sample;
        try {
            sample = make_patch_sample(skeleton, centers[i], oc, cfg.sigma);
        } catch (const OffStructure&) {
            throw InvalidArgument("center " + to_string(centers[i]) + " is off structure");
        }
        ordered_json p;
        p["center"] = {sample.center.row, sample.center.col};
        p["window"] = {sample.patch.row0, sample.patch.col0, sample.patch.row1, sample.patch.col1};
        ordered_json locs = ordered_json::array();
        for (const auto& l : sample.locations) locs.push_back({l.row, l.col});
        p["locations"] = std::move(locs);
        patches.push_back(std::move(p));
        if (!args.heatmap_dir.empty()) {
            char name[32];
            std::snprintf(name, sizeof name, "patch_%04zu.pgm", i);
            write_probability_pgm(fs::path(args.heatmap_dir) / name, sample.heatmap);
        }
    }
    ordered_json j;
    j["k"] = oc.k;
    j["s"] = oc.s;
    j["patches"] = std::move(patches);
    const std::string line = j.dump() + "\n";
    if (args.out.empty())
        out << line;
    else
        write_file_atomic(args.out, line);
    return kSuccess;
}

// --------------------------------------------------------------- render

struct RenderArgs {
    std::string probmap;
    std::string graph;
    std::string out;
};

int cmd_render(const RenderArgs& args) {
    require_directory(fs::absolute(args.out).parent_path());
    const ProbabilityMap probmap = read_probability_pgm(args.probmap);
    NetworkGraph graph(probmap.width(), probmap.height());
    if (!args.graph.empty()) graph = read_graph_json(args.graph);
    if (graph.width() != probmap.width() || graph.height() != probmap.height())
        throw InvalidArgument("graph and probability map differ in size");
    if (fs::path(args.out).extension() == ".ppm") {
        write_ppm(args.out, colour_overlay(probmap, graph));
    } else {
        std::ostringstream buf;
        write_pgm(buf, overlay(probmap, graph, false));
        write_file_atomic(args.out, buf.str());
    }
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Topology extraction and evaluation for curvilinear networks", "topotrace"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic scene");
    gen.config.attach(gen_cmd);
    gen_cmd->add_option("--out-dir", gen.out_dir, "Directory for the generated files")->required();

    TraceArgs trace;
    auto* trace_cmd = app.add_subcommand("trace", "Delineate a probability map into a graph");
    trace.config.attach(trace_cmd);
    trace_cmd->add_option("--probmap", trace.probmap, "Probability map (PGM)")->required();
    trace_cmd->add_option("--oracle", trace.oracle, "'probmap' or 'gt:<mask.pgm>'");
    trace_cmd->add_option("--out", trace.out, "Output graph JSON")->required();
    trace_cmd->add_option("--report", trace.report, "Trace report JSON");
    trace_cmd->add_option("--snapshots", trace.snapshots, "Directory for per-visit overlay PGMs");
    trace_cmd->add_option("--snapshot-every", trace.snapshot_every, "Write a snapshot every N visits");
    trace_cmd->add_flag("--verbose", trace.verbose, "Print each visit to stderr");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Compare a predicted graph with ground truth");
    eval.config.attach(eval_cmd);
    eval_cmd->add_option("--pred", eval.pred, "Predicted graph JSON or mask PGM")->required();
    eval_cmd->add_option("--gt", eval.gt, "Ground-truth graph JSON or mask PGM")->required();
    eval_cmd->add_option("--segments-csv", eval.segments_csv, "Per-segment outcomes CSV");
    eval_cmd->add_flag("--serial", eval.serial, "Check segments on one thread");

    PatchArgs patch;
    auto* patch_cmd = app.add_subcommand("patch-gt", "Export patch ground truth");
    patch.config.attach(patch_cmd);
    patch_cmd->add_option("--mask", patch.mask, "Ground-truth mask (PGM)")->required();
    patch_cmd->add_option("--center", patch.centers, "Patch center ROW,COL (repeatable)");
    patch_cmd->add_option("--sample", patch.sample, "Number of random on-structure centers (uses --seed)");
    patch_cmd->add_option("--heatmap-dir", patch.heatmap_dir, "Directory for rendered patch heatmaps");
    patch_cmd->add_option("--out", patch.out, "Write the JSON here instead of stdout");

    RenderArgs render;
    auto* render_cmd = app.add_subcommand("render", "Draw a graph over a probability map");
    render_cmd->add_option("--probmap", render.probmap, "Probability map (PGM)")->required();
    render_cmd->add_option("--graph", render.graph, "Graph JSON");
    render_cmd->add_option("--out", render.out, "Output image (.pgm or .ppm)")->required();

    std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(reversed.begin(), reversed.end());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (app.got_subcommand(gen_cmd)) return cmd_gen(gen, out);
        if (app.got_subcommand(trace_cmd)) return cmd_trace(trace, out, err);
        if (app.got_subcommand(eval_cmd)) return cmd_eval(eval, out);
        if (app.got_subcommand(patch_cmd)) return cmd_patch_gt(patch, out);
        if (app.got_subcommand(render_cmd)) return cmd_render(render);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return kUsageError;
}

}  // namespace topotrace::cli
