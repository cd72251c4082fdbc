#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "topotrace/delineate.hpp"
#include "topotrace/metrics.hpp"
#include "topotrace/synth.hpp"

namespace topotrace {

/// Every tunable of the pipeline, addressable by a flat key.
struct RunConfig {
    DelineationConfig delineation;
    EvalConfig eval;
    SynthParams synth;
    double sigma = 2.0;  ///< heatmap sigma for patch exports

    /// Validates every section. Throws InvalidArgument.
    void validate() const;
};

using ConfigValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// ignored. Throws FormatError on malformed lines, duplicate or unknown keys.
ConfigValues parse_config(const std::string& text);
ConfigValues read_config(const std::filesystem::path& path);

/// Assigns each value to its field. Throws InvalidArgument on an unknown key
/// or a value that does not parse as the field's type.
void apply_config(RunConfig& cfg, const ConfigValues& values);

/// All recognised keys, in a stable order.
const std::vector<std::string>& config_keys();

bool is_config_key(const std::string& key);

}  // namespace topotrace
