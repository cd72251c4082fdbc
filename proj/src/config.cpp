#include "topotrace/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace topotrace {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty())
        throw InvalidArgument("config key '" + key + "': cannot parse '" + text + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw InvalidArgument("config key '" + key + "': expected a boolean, got '" + text + "'");
}

template <typename T>
Setter field(T RunConfig::*section, auto member) {
    return [section, member](RunConfig& cfg, const std::string& text) {
        auto& target = (cfg.*section).*member;
        using V = std::remove_reference_t<decltype(target)>;
        if constexpr (std::is_same_v<V, bool>)
            target = parse_bool("", text);
        else
            target = parse_number<V>("", text);
    };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"k", [](RunConfig& c, const std::string& v) { c.delineation.oracle.k = parse_number<int>("k", v); }},
        {"s", [](RunConfig& c, const std::string& v) { c.delineation.oracle.s = parse_number<int>("s", v); }},
        {"tau_occupancy",
         [](RunConfig& c, const std::string& v) {
             c.delineation.oracle.tau_occupancy = parse_number<double>("tau_occupancy", v);
         }},
        {"tau_conf", field(&RunConfig::delineation, &DelineationConfig::tau_conf)},
        {"r_nbhd", field(&RunConfig::delineation, &DelineationConfig::r_nbhd)},
        {"d_restart",
         [](RunConfig& c, const std::string& v) { c.delineation.d_restart = parse_number<double>("d_restart", v); }},
        {"tau_restart", field(&RunConfig::delineation, &DelineationConfig::tau_restart)},
        {"max_steps",
         [](RunConfig& c, const std::string& v) { c.delineation.max_steps = parse_number<long>("max_steps", v); }},
        {"d_match", field(&RunConfig::eval, &EvalConfig::d_match)},
        {"connectivity_ratio", field(&RunConfig::eval, &EvalConfig::connectivity_ratio)},
        {"d_near", field(&RunConfig::eval, &EvalConfig::d_near)},
        {"symmetric_ratio", field(&RunConfig::eval, &EvalConfig::symmetric_ratio)},
        {"seed", field(&RunConfig::synth, &SynthParams::seed)},
        {"width", field(&RunConfig::synth, &SynthParams::width)},
        {"height", field(&RunConfig::synth, &SynthParams::height)},
        {"n_seeds", field(&RunConfig::synth, &SynthParams::n_seeds)},
        {"branch_prob", field(&RunConfig::synth, &SynthParams::branch_prob)},
        {"step_len", field(&RunConfig::synth, &SynthParams::step_len)},
        {"n_components", field(&RunConfig::synth, &SynthParams::n_components)},
        {"max_branches", field(&RunConfig::synth, &SynthParams::max_branches)},
        {"max_branch_depth", field(&RunConfig::synth, &SynthParams::max_branch_depth)},
        {"blur_radius",
         [](RunConfig& c, const std::string& v) { c.synth.corruption.blur_radius = parse_number<int>("blur_radius", v); }},
        {"noise_amp",
         [](RunConfig& c, const std::string& v) { c.synth.corruption.noise_amp = parse_number<double>("noise_amp", v); }},
        {"gap_count",
         [](RunConfig& c, const std::string& v) { c.synth.corruption.gap_count = parse_number<int>("gap_count", v); }},
        {"gap_len", [](RunConfig& c, const std::string& v) { c.synth.corruption.gap_len = parse_number<int>("gap_len", v); }},
        {"clutter_count",
         [](RunConfig& c, const std::string& v) {
             c.synth.corruption.clutter_count = parse_number<int>("clutter_count", v);
         }},
        {"sigma", [](RunConfig& c, const std::string& v) { c.sigma = parse_number<double>("sigma", v); }},
    };
    return table;
}

const Setter* find_setter(const std::string& key) {
    for (const auto& [name, setter] : setters())
        if (name == key) return &setter;
    return nullptr;
}

}  // namespace

void RunConfig::validate() const {
    delineation.validate();
    eval.validate();
    synth.validate();
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& entry : setters()) out.push_back(entry.first);
        return out;
    }();
    return keys;
}

bool is_config_key(const std::string& key) { return find_setter(key) != nullptr; }

ConfigValues parse_config(const std::string& text) {
    ConfigValues values;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw FormatError("config line " + std::to_string(lineno) + ": empty key");
        if (!is_config_key(key)) throw FormatError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!values.emplace(key, value).second)
            throw FormatError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return values;
}

ConfigValues read_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_config(RunConfig& cfg, const ConfigValues& values) {
    for (const auto& [key, value] : values) {
        const Setter* setter = find_setter(key);
        if (!setter) throw InvalidArgument("unknown config key '" + key + "'");
        try {
            (*setter)(cfg, value);
        } catch (const InvalidArgument&) {
            throw InvalidArgument("config key '" + key + "': cannot parse '" + value + "'");
        }
    }
}

}  // namespace topotrace
