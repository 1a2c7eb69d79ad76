#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "eea/experiment.hpp"

namespace eea {

using ConfigMap = std::map<std::string, std::string>;

/// Flat `key = value` text; '#' starts a comment. Unknown keys are an error.
ConfigMap parse_config_stream(std::istream& in);
ConfigMap parse_config_file(const std::string& path);

const std::vector<std::string>& known_config_keys();

/// Builds a full config: the experiment/agent pair is read first, the
/// per-experiment defaults are resolved, then every entry of `map` is
/// applied on top (so explicit keys always win over defaults).
ExperimentConfig config_from_map(const ConfigMap& map);

/// The effective configuration as config-file text, one line per key.
std::string render_config(const ExperimentConfig& config);

}  // namespace eea
