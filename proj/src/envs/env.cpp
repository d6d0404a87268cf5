#include "steach/envs/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "steach/common/error.hpp"

namespace steach::envs {

std::string_view to_string(EnvFamily family) {
  switch (family) {
    case EnvFamily::MountainCar: return "mountain_car";
    case EnvFamily::CartPoleSwingUp: return "cartpole_swingup";
  }
  return "unknown";
}

EnvFamily parse_family(std::string_view text) {
  if (text == "mountain_car") return EnvFamily::MountainCar;
  if (text == "cartpole_swingup") return EnvFamily::CartPoleSwingUp;
  throw ConfigError("unknown environment family '" + std::string(text) + "'");
}

std::string_view to_string(DoneReason reason) {
  switch (reason) {
    case DoneReason::None: return "none";
    case DoneReason::Goal: return "goal";
    case DoneReason::Horizon: return "horizon";
    case DoneReason::Constraint: return "constraint";
  }
  return "unknown";
}

EnvParams EnvParams::mountain_car() {
  EnvParams p;
  p.family = EnvFamily::MountainCar;
  p.horizon = 1000;
  return p;
}

EnvParams EnvParams::cartpole_swingup() {
  EnvParams p;
  p.family = EnvFamily::CartPoleSwingUp;
  p.horizon = 500;
  return p;
}

void EnvParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("env params: ") + what);
  };
  require(std::isfinite(power) && power > 0.0, "power must be > 0");
  require(std::isfinite(pole_mass) && pole_mass > 0.0, "pole_mass must be > 0");
  require(std::isfinite(cart_mass) && cart_mass > 0.0, "cart_mass must be > 0");
  require(std::isfinite(pole_half_length) && pole_half_length > 0.0, "pole_half_length must be > 0");
  require(std::isfinite(x_limit) && x_limit > 0.0, "x_limit must be > 0");
  require(upright_cosine_threshold > 0.0 && upright_cosine_threshold <= 1.0,
          "upright_cosine_threshold must lie in (0, 1]");
  require(horizon >= 1, "horizon must be >= 1");
  require(std::isfinite(gravity), "gravity must be finite");
  require(std::isfinite(timestep) && timestep > 0.0, "timestep must be > 0");
  require(substeps >= 1, "substeps must be >= 1");
  require(std::isfinite(force_scale) && force_scale > 0.0, "force_scale must be > 0");
  require(std::isfinite(goal_x), "goal_x must be finite");
}

SpaceInfo space_info(const EnvParams& params) {
  SpaceInfo info;
  info.state_dim = params.family == EnvFamily::MountainCar ? 2 : 4;
  info.action_dim = 1;
  info.action_low = Eigen::VectorXd::Constant(1, -1.0);
  info.action_high = Eigen::VectorXd::Constant(1, 1.0);
  return info;
}

Eigen::VectorXd clip_action(const EnvParams& params, const Eigen::VectorXd& action) {
  const auto info = space_info(params);
  if (action.size() != info.action_dim) {
    throw ShapeError("action has dimension " + std::to_string(action.size()) + ", expected " +
                     std::to_string(info.action_dim));
  }
  return action.cwiseMax(info.action_low).cwiseMin(info.action_high);
}

EnvState reset(const EnvParams& params, Rng& rng) {
  EnvState s;
  if (params.family == EnvFamily::MountainCar) {
    s.x = Eigen::Vector2d(rng.uniform(-0.6, -0.4), 0.0);
  } else {
    s.x.resize(4);
    s.x[0] = rng.uniform(-0.01, 0.01);
    s.x[1] = rng.uniform(-0.01, 0.01);
    s.x[2] = std::numbers::pi + rng.uniform(-0.01, 0.01);
    s.x[3] = rng.uniform(-0.01, 0.01);
  }
  s.t = 0;
  return s;
}

EnvState reset(const EnvParams& params, std::uint64_t seed) {
  Rng rng(seed);
  return reset(params, rng);
}

namespace {

StepResult step_mountain_car(const EnvParams& p, const EnvState& s, double a) {
  if (s.x.size() != 2) throw ShapeError("mountain car state must have 2 entries");
  double v = s.x[1] + a * p.power - 0.0025 * std::cos(3.0 * s.x[0]);
  v = std::clamp(v, -kMountainCarMaxSpeed, kMountainCarMaxSpeed);
  double x = std::clamp(s.x[0] + v, kMountainCarMinX, kMountainCarMaxX);

  StepResult r;
  r.next_state.x = Eigen::Vector2d(x, v);
  r.next_state.t = s.t + 1;
  if (x >= p.goal_x) {
    r.reward_ext = 1.0;
    r.done = true;
    r.done_reason = DoneReason::Goal;
  } else if (r.next_state.t >= p.horizon) {
    r.done = true;
    r.done_reason = DoneReason::Horizon;
  }
  return r;
}

StepResult step_cartpole(const EnvParams& p, const EnvState& s, double a) {
  if (s.x.size() != 4) throw ShapeError("cart-pole state must have 4 entries");
  const double m = p.pole_mass;
  const double total = p.cart_mass + p.pole_mass;
  const double l = p.pole_half_length;
  const double force = p.force_scale * a;
  const double dt = p.timestep / p.substeps;
  double x = s.x[0], x_dot = s.x[1], th = s.x[2], th_dot = s.x[3];
  for (int k = 0; k < p.substeps; ++k) {
    const double sin_t = std::sin(th);
    const double cos_t = std::cos(th);
    const double temp = (force + m * l * th_dot * th_dot * sin_t) / total;
    const double th_acc =
        (p.gravity * sin_t - cos_t * temp) / (l * (4.0 / 3.0 - m * cos_t * cos_t / total));
    const double x_acc = temp - m * l * th_acc * cos_t / total;
    // semi-implicit Euler: velocities first, positions from the new velocities
    x_dot += dt * x_acc;
    th_dot += dt * th_acc;
    x += dt * x_dot;
    th += dt * th_dot;
  }

  StepResult r;
  r.next_state.x.resize(4);
  r.next_state.x << x, x_dot, th, th_dot;
  r.next_state.t = s.t + 1;
  if (std::abs(x) > p.x_limit) {
    r.done = true;
    r.done_reason = DoneReason::Constraint;
    return r;
  }
  r.reward_ext = std::cos(th) >= p.upright_cosine_threshold ? 1.0 : 0.0;
  if (r.next_state.t >= p.horizon) {
    r.done = true;
    r.done_reason = DoneReason::Horizon;
  }
  return r;
}

}  // namespace

StepResult step(const EnvParams& params, const EnvState& state, const Eigen::VectorXd& action) {
  if (!action.allFinite()) throw NumericError("step: non-finite action");
  const double a = clip_action(params, action)[0];
  if (params.family == EnvFamily::MountainCar) return step_mountain_car(params, state, a);
  return step_cartpole(params, state, a);
}

double cartpole_energy(const EnvParams& p, const Eigen::VectorXd& s) {
  const double m = p.pole_mass;
  const double l = p.pole_half_length;
  const double x_dot = s[1], th = s[2], th_dot = s[3];
  const double kinetic = 0.5 * (p.cart_mass + m) * x_dot * x_dot +
                         m * l * x_dot * th_dot * std::cos(th) + (2.0 / 3.0) * m * l * l * th_dot * th_dot;
  const double potential = m * p.gravity * l * (std::cos(th) + 1.0);
  return kinetic + potential;
}

}  // namespace steach::envs
