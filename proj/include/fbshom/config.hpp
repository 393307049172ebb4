#ifndef FBSHOM_CONFIG_HPP
#define FBSHOM_CONFIG_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fbshom/montecarlo.hpp"

namespace fbshom::config {

inline constexpr const char* kToolVersion = "1.0.0";

/// Flat `key = value` text with `#` comments, SI units throughout.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& is);
KeyValues parse_key_values_file(const std::string& path);

/// Builds an experiment configuration from defaults plus overrides. Unknown
/// keys are rejected. Frequency-like keys take Hz and are converted to
/// angular units internally.
montecarlo::ExperimentConfig experiment_config(const KeyValues& keys);

/// The `autocorrelation` key (0/1), recognized alongside the experiment keys.
bool autocorrelation_flag(const KeyValues& keys);

/// Full resolved configuration back as canonical key-value text (Hz units),
/// suitable for hashing and manifests.
KeyValues to_key_values(const montecarlo::ExperimentConfig& config, bool autocorrelation);

std::string canonical_text(const KeyValues& keys);
/// FNV-1a over the canonical text, as fixed-width hex.
std::string config_hash(const KeyValues& keys);

struct Manifest {
    std::string subcommand;
    KeyValues config;
    std::vector<std::string> outputs;
    std::string hash;
    std::string tool_version;
};

void write_manifest(const Manifest& manifest, const std::string& path);
Manifest read_manifest(const std::string& path);

/// JSON mirror of a CSV file: {"header": [...], "rows": [[...], ...]} with
/// all cells kept as strings so the mirror is exact.
void write_csv_json_mirror(const std::string& csv_path, const std::string& json_path);

} // namespace fbshom::config

#endif
