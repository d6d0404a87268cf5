#pragma once

#include <filesystem>

#include "steach/policy/gaussian_policy.hpp"
#include "steach/train/trainer.hpp"

namespace steach::train {

// Policy file: tag "STDPOLI1", feature map name, action bounds, log_std and
// the mean network (layer sizes, flat parameters).
void save_policy(const std::filesystem::path& path, const policy::GaussianPolicy& policy);
policy::GaussianPolicy load_policy(const std::filesystem::path& path);

// State file: tag "STDSTAT1", serialized config text, epoch, every network,
// optimizer, buffer and generator, then the Student reward list.
void save_state(const std::filesystem::path& path, const TrainingState& state);
TrainingState load_state(const std::filesystem::path& path);

}  // namespace steach::train
