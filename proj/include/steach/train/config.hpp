#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "steach/envs/env.hpp"
#include "steach/envs/features.hpp"
#include "steach/nn/adam.hpp"
#include "steach/policy/trpo.hpp"
#include "steach/policy/value_function.hpp"
#include "steach/student/student.hpp"
#include "steach/surprise/surprise.hpp"

namespace steach::train {

/// full: both surprise terms. surprise_max_baseline: eta0_S forced to 0.
/// plain: both weights forced to 0.
enum class Mode { Full, SurpriseMaxBaseline, Plain };

std::string_view to_string(Mode mode);
/// Accepts "full", "surprise_max_baseline" / "surprise-max", "plain".
Mode parse_mode(std::string_view text);

struct NetworkConfig {
  std::vector<int> dynamics_hidden{64, 64};
  std::vector<int> policy_hidden{32, 32};
  std::vector<int> value_hidden{32, 32};
  double init_log_std = 0.0;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct DynamicsConfig {
  int buffer_capacity = 100000;
  int fit_epochs = 20;
  int batch_size = 256;
  nn::AdamConfig adam{};
  double logvar_min = -10.0;
  double logvar_max = 4.0;

  friend bool operator==(const DynamicsConfig&, const DynamicsConfig&) = default;
};

struct TeacherConfig {
  policy::TrpoConfig trpo{};
  double gamma = 0.99;
  double lambda = 0.97;

  friend bool operator==(const TeacherConfig&, const TeacherConfig&) = default;
};

struct ExperimentConfig {
  std::string name = "custom";
  Mode mode = Mode::Full;
  std::uint64_t seed = 0;
  int epochs = 300;
  int steps_per_epoch = 5000;
  int demo_steps = 2000;
  int student_rollout_steps = 2000;
  int eval_episodes = 5;
  /// Random-action transitions placed in the Teacher buffer before epoch 0.
  int warmup_steps = 5000;
  /// Dump demonstrations every N epochs (and at the last epoch); 0 disables.
  int demo_dump_every = 10;
  /// Save the full training state every N epochs; 0 saves only the final state.
  int checkpoint_every = 0;

  envs::EnvParams teacher_env = envs::EnvParams::mountain_car();
  envs::EnvParams student_env = envs::EnvParams::mountain_car();
  surprise::SurpriseWeights weights{};
  /// Subtract the batch mean of r_int before the Teacher update. The raw
  /// surprises are log-densities of a confident model and mostly negative, so
  /// uncentered they reward ending episodes early.
  bool center_intrinsic = true;
  NetworkConfig networks{};
  DynamicsConfig dynamics{};
  TeacherConfig teacher{};
  policy::ValueFitOptions value{};
  student::BcOptions bc{};

  /// Weights after applying the mode override.
  surprise::SurpriseWeights effective_weights() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

envs::FeatureMap feature_map_for(envs::EnvFamily family);

}  // namespace steach::train
