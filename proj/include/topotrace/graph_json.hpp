#pragma once

#include <filesystem>
#include <string>

#include "topotrace/graph.hpp"

namespace topotrace {

// Interchange format:
//   {"width": W, "height": H,
//    "nodes": [[row, col], ...],
//    "edges": [{"points": [[row, col], ...]}, ...]}

std::string graph_to_json(const NetworkGraph& graph);
NetworkGraph graph_from_json(const std::string& text);

NetworkGraph read_graph_json(const std::filesystem::path& path);
void write_graph_json(const std::filesystem::path& path, const NetworkGraph& graph);

}  // namespace topotrace
