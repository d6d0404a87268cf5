#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "steach/train/config.hpp"

namespace steach::cli {

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
train::ExperimentConfig preset(std::string_view name);

}  // namespace steach::cli
