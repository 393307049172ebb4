#include "fbshom/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "fbshom/numerics.hpp"
#include "fbshom/spectral.hpp"

namespace fbshom::config {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse number '" + value + "'");
    }
    if (used != value.size())
        throw config_error("key '" + key + "': trailing junk in '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(value, &used);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse integer '" + value + "'");
    }
    if (used != value.size())
        throw config_error("key '" + key + "': trailing junk in '" + value + "'");
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

KeyValues parse_key_values(std::istream& is) {
    KeyValues out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("line " + std::to_string(line_no) + ": empty key or value");
        if (out.count(key))
            throw config_error("duplicate key '" + key + "'");
        out[key] = value;
    }
    return out;
}

KeyValues parse_key_values_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path);
    return parse_key_values(is);
}

montecarlo::ExperimentConfig experiment_config(const KeyValues& keys) {
    montecarlo::ExperimentConfig c;
    for (const auto& [key, value] : keys) {
        if (key == "pair_rate") c.pair_rate = parse_double(key, value);
        else if (key == "window_length_s") c.window_length = parse_double(key, value);
        else if (key == "window_period_s") c.window_period = parse_double(key, value);
        else if (key == "detection_efficiency_r") c.detection_efficiency_r = parse_double(key, value);
        else if (key == "detection_efficiency_b") c.detection_efficiency_b = parse_double(key, value);
        else if (key == "dark_rate_r") c.dark_rate_r = parse_double(key, value);
        else if (key == "dark_rate_b") c.dark_rate_b = parse_double(key, value);
        else if (key == "jitter_sigma_s") c.jitter_sigma = parse_double(key, value);
        else if (key == "multi_pair_parameter") c.multi_pair_parameter = parse_double(key, value);
        else if (key == "ideality") c.ideality = parse_double(key, value);
        else if (key == "strength") c.fbs.strength = parse_double(key, value);
        else if (key == "pump_phase") c.fbs.pump_phase = parse_double(key, value);
        else if (key == "detuning_hz") c.detuning = spectral::two_pi * parse_double(key, value);
        else if (key == "linewidth_hz")
            c.source.linewidth = spectral::two_pi * parse_double(key, value);
        else if (key == "pump_frequency_hz")
            c.source.pump_frequency = spectral::two_pi * parse_double(key, value);
        else if (key == "fsr_hz") c.source.fsr = parse_double(key, value);
        else if (key == "resonance_index") {
            const auto m = static_cast<int>(parse_u64(key, value));
            c.source.signal_index = m;
            c.source.idler_index = m;
        } else if (key == "duration_s") c.duration = parse_double(key, value);
        else if (key == "seed") c.seed = parse_u64(key, value);
        else if (key == "tau_bin_s") c.tau_bin = parse_double(key, value);
        else if (key == "tau_max_s") c.tau_max = parse_double(key, value);
        else if (key == "autocorrelation") parse_u64(key, value); // handled separately
        else throw config_error("unknown configuration key '" + key + "'");
    }
    c.validate();
    return c;
}

bool autocorrelation_flag(const KeyValues& keys) {
    const auto it = keys.find("autocorrelation");
    if (it == keys.end()) return false;
    return parse_u64("autocorrelation", it->second) != 0;
}

KeyValues to_key_values(const montecarlo::ExperimentConfig& c, bool autocorrelation) {
    KeyValues k;
    k["pair_rate"] = fmt(c.pair_rate);
    k["window_length_s"] = fmt(c.window_length);
    k["window_period_s"] = fmt(c.window_period);
    k["detection_efficiency_r"] = fmt(c.detection_efficiency_r);
    k["detection_efficiency_b"] = fmt(c.detection_efficiency_b);
    k["dark_rate_r"] = fmt(c.dark_rate_r);
    k["dark_rate_b"] = fmt(c.dark_rate_b);
    k["jitter_sigma_s"] = fmt(c.jitter_sigma);
    k["multi_pair_parameter"] = fmt(c.multi_pair_parameter);
    k["ideality"] = fmt(c.ideality);
    k["strength"] = fmt(c.fbs.strength);
    k["pump_phase"] = fmt(c.fbs.pump_phase);
    k["detuning_hz"] = fmt(c.detuning / spectral::two_pi);
    k["linewidth_hz"] = fmt(c.source.linewidth / spectral::two_pi);
    k["pump_frequency_hz"] = fmt(c.source.pump_frequency / spectral::two_pi);
    k["fsr_hz"] = fmt(c.source.fsr);
    k["resonance_index"] = std::to_string(c.source.signal_index);
    k["duration_s"] = fmt(c.duration);
    k["seed"] = std::to_string(c.seed);
    k["tau_bin_s"] = fmt(c.tau_bin);
    k["tau_max_s"] = fmt(c.tau_max);
    k["autocorrelation"] = autocorrelation ? "1" : "0";
    return k;
}

std::string canonical_text(const KeyValues& keys) {
    std::ostringstream os;
    for (const auto& [key, value] : keys) os << key << " = " << value << "\n";
    return os.str();
}

std::string config_hash(const KeyValues& keys) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(numerics::fnv1a64(canonical_text(keys))));
    return buf;
}

void write_manifest(const Manifest& manifest, const std::string& path) {
    nlohmann::json j;
    j["subcommand"] = manifest.subcommand;
    j["tool_version"] = kToolVersion;
    j["config_hash"] = config_hash(manifest.config);
    j["config"] = manifest.config;
    j["outputs"] = manifest.outputs;
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    os << j.dump(2) << "\n";
}

Manifest read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw io_error("bad manifest " + path + ": " + e.what());
    }
    Manifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.hash = j.at("config_hash").get<std::string>();
    m.config = j.at("config").get<KeyValues>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    if (m.hash != config_hash(m.config))
        throw config_error("manifest hash mismatch in " + path);
    return m;
}

void write_csv_json_mirror(const std::string& csv_path, const std::string& json_path) {
    std::ifstream is(csv_path);
    if (!is) throw io_error("cannot open " + csv_path);
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = s.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(s.substr(start));
                break;
            }
            cells.push_back(s.substr(start, comma - start));
            start = comma + 1;
        }
        return cells;
    };
    nlohmann::json j;
    if (!std::getline(is, line)) throw io_error("empty CSV " + csv_path);
    j["header"] = split(line);
    j["rows"] = nlohmann::json::array();
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        j["rows"].push_back(split(line));
    }
    std::ofstream os(json_path);
    if (!os) throw io_error("cannot open " + json_path);
    os << j.dump(2) << "\n";
}

} // namespace fbshom::config
