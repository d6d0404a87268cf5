#pragma once

#include <string>
#include <vector>

#include "steach/train/config.hpp"

namespace steach::cli {

// Section/key-value text mirroring ExperimentConfig field for field:
//
//   # comment
//   [experiment]
//   preset = cartpole-hetero-xlimit   # optional; applied before other keys
//   epochs = 150
//   [student_env]
//   x_limit = 2.4
//
// Omitted keys keep their defaults (or the preset's values). Unknown
// sections or keys, malformed values and range violations raise ConfigError
// naming the key and line.

train::ExperimentConfig parse_config(const std::string& text);
/// Writes every field (never a preset key), so parse_config inverts it exactly.
std::string serialize_config(const train::ExperimentConfig& config);

train::ExperimentConfig load_config_file(const std::string& path);

/// "section.key" for every accepted key, in serialization order.
std::vector<std::string> known_keys();

}  // namespace steach::cli
