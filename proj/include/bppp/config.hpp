// config.hpp
// Flat key=value run configuration. The same keys work in a config file and
// as command-line flags; command-line values always win.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bppp/runner.hpp"

namespace bppp {

using ConfigMap = std::map<std::string, std::string>;

// `key = value` lines, `#` comments, blank lines ignored.
ConfigMap parse_config_file(const std::filesystem::path& path);

// Applies entries onto the settings; unknown keys or unparsable values throw
// ConfigError naming the key.
void apply_config(RunSettings& settings, const ConfigMap& entries);

// Keys accepted by apply_config, for --help and flag registration.
const std::vector<std::string>& config_keys();

}  // namespace bppp
