#pragma once

#include <filesystem>
#include <iosfwd>

#include "steach/dynamics/buffer.hpp"
#include "steach/dynamics/model.hpp"

namespace steach::dynamics {

// Model file layout (all integers little-endian u64 unless noted, doubles as
// IEEE-754 bit patterns):
//   tag "STDMODL1"
//   u64 state_dim, u64 action_dim, str owner ("teacher"|"student")
//   f64 logvar_min, f64 logvar_max
//   u64 n_layer_sizes, then each size as u64
//   vec normalizer mean, vec normalizer std
//   vec flat trunk parameters (see nn::MlpParams for ordering)

void write_model(std::ostream& out, const GaussianDynamicsModel& model);
GaussianDynamicsModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const GaussianDynamicsModel& model);
GaussianDynamicsModel load_model(const std::filesystem::path& path);

void write_buffer(std::ostream& out, const TransitionBuffer& buffer);
TransitionBuffer read_buffer(std::istream& in);

}  // namespace steach::dynamics
