#include "topotrace/graph_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "topotrace/error.hpp"
#include "topotrace/pgm.hpp"

namespace topotrace {

using json = nlohmann::ordered_json;

namespace {

json coord_json(PixelCoord p) { return json::array({p.row, p.col}); }

PixelCoord coord_from(const json& j, int width, int height) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw FormatError("graph JSON: coordinate must be [row, col] integers, got " + j.dump());
    const PixelCoord p{j[0].get<int>(), j[1].get<int>()};
    if (p.row < 0 || p.col < 0 || p.row >= height || p.col >= width)
        throw FormatError("graph JSON: coordinate " + to_string(p) + " outside " + std::to_string(width) + "x" +
                          std::to_string(height));
    return p;
}

}  // namespace

std::string graph_to_json(const NetworkGraph& graph) {
    json doc;
    doc["width"] = graph.width();
    doc["height"] = graph.height();
    json nodes = json::array();
    for (const auto& n : graph.nodes()) nodes.push_back(coord_json(n));
    doc["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const auto& e : graph.edges()) {
        json pts = json::array();
        for (const auto& p : e) pts.push_back(coord_json(p));
        edges.push_back(json{{"points", std::move(pts)}});
    }
    doc["edges"] = std::move(edges);
    return doc.dump() + "\n";
}

NetworkGraph graph_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("graph JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("width") || !doc.contains("height"))
        throw FormatError("graph JSON: missing width/height");
    if (!doc["width"].is_number_integer() || !doc["height"].is_number_integer())
        throw FormatError("graph JSON: width/height must be integers");
    const int width = doc["width"].get<int>();
    const int height = doc["height"].get<int>();
    if (width <= 0 || height <= 0) throw FormatError("graph JSON: width/height must be positive");

    NetworkGraph graph(width, height);
    if (doc.contains("nodes")) {
        if (!doc["nodes"].is_array()) throw FormatError("graph JSON: nodes must be an array");
        for (const auto& n : doc["nodes"]) graph.add_node(coord_from(n, width, height));
    }
    if (doc.contains("edges")) {
        if (!doc["edges"].is_array()) throw FormatError("graph JSON: edges must be an array");
        for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
            const auto& e = doc["edges"][i];
            if (!e.is_object() || !e.contains("points") || !e["points"].is_array())
                throw FormatError("graph JSON: edge " + std::to_string(i) + " needs a points array");
            Polyline pts;
            for (const auto& p : e["points"]) pts.push_back(coord_from(p, width, height));
            try {
                graph.add_edge(std::move(pts));
            } catch (const InvalidArgument& err) {
                throw FormatError("graph JSON: edge " + std::to_string(i) + ": " + err.what());
            }
        }
    }
    return graph;
}

NetworkGraph read_graph_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return graph_from_json(buf.str());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_graph_json(const std::filesystem::path& path, const NetworkGraph& graph) {
    write_file_atomic(path, graph_to_json(graph));
}

}  // namespace topotrace
