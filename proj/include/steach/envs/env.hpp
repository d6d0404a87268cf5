#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>

#include "steach/common/rng.hpp"

namespace steach::envs {

enum class EnvFamily { MountainCar, CartPoleSwingUp };

std::string_view to_string(EnvFamily family);
EnvFamily parse_family(std::string_view text);

/// Physical and episode parameters for one agent's environment.
///
/// Fields irrelevant to `family` are kept (and serialized) but ignored.
/// MountainCar uses power, goal_x and horizon. CartPoleSwingUp uses the
/// masses, pole half length, x_limit, upright threshold, gravity, timestep,
/// substeps, force_scale and horizon.
struct EnvParams {
  EnvFamily family = EnvFamily::MountainCar;
  double power = 0.001;
  double goal_x = 0.45;
  double pole_mass = 0.1;
  double cart_mass = 1.0;
  double pole_half_length = 0.5;
  double x_limit = 2.4;
  double upright_cosine_threshold = 0.8;
  int horizon = 1000;
  double gravity = 9.8;
  /// Integrator step in seconds; one env step advances `substeps` of these.
  double timestep = 0.01;
  int substeps = 2;
  double force_scale = 10.0;

  static EnvParams mountain_car();
  static EnvParams cartpole_swingup();

  /// Throws ConfigError on any invariant violation.
  void validate() const;

  friend bool operator==(const EnvParams&, const EnvParams&) = default;
};

/// MountainCar: (x, v). CartPoleSwingUp: (x, x_dot, theta, theta_dot) with
/// theta measured from upright.
struct EnvState {
  Eigen::VectorXd x;
  int t = 0;
};

enum class DoneReason { None, Goal, Horizon, Constraint };
std::string_view to_string(DoneReason reason);

struct StepResult {
  EnvState next_state;
  double reward_ext = 0.0;
  bool done = false;
  DoneReason done_reason = DoneReason::None;
};

struct SpaceInfo {
  int state_dim = 0;
  int action_dim = 0;
  Eigen::VectorXd action_low;
  Eigen::VectorXd action_high;
};

inline constexpr double kMountainCarMinX = -1.2;
inline constexpr double kMountainCarMaxX = 0.6;
inline constexpr double kMountainCarMaxSpeed = 0.07;

EnvState reset(const EnvParams& params, Rng& rng);
EnvState reset(const EnvParams& params, std::uint64_t seed);

/// Pure transition. The action is clipped to [-1, 1] before use; a
/// non-finite action raises NumericError.
StepResult step(const EnvParams& params, const EnvState& state, const Eigen::VectorXd& action);

SpaceInfo space_info(const EnvParams& params);

/// Clips an action into the box reported by space_info.
Eigen::VectorXd clip_action(const EnvParams& params, const Eigen::VectorXd& action);

/// Cart-pole mechanical energy, zero with the pole hanging at rest.
double cartpole_energy(const EnvParams& params, const Eigen::VectorXd& x);

}  // namespace steach::envs
