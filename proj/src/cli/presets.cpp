#include "steach/cli/presets.hpp"

#include <functional>
#include <utility>

#include "steach/common/error.hpp"

namespace steach::cli {

namespace {

using train::ExperimentConfig;

// Desk-scale budgets: smaller rollout batches and model-fit passes than the
// library defaults so a five-seed comparison finishes on one CPU core.
ExperimentConfig mountain_car_base() {
  ExperimentConfig c;
  c.teacher_env = envs::EnvParams::mountain_car();
  c.student_env = envs::EnvParams::mountain_car();
  c.weights = {0.001, 0.001};
  c.epochs = 60;
  c.steps_per_epoch = 3000;
  c.demo_steps = 1000;
  c.student_rollout_steps = 1000;
  c.eval_episodes = 3;
  c.warmup_steps = 5000;
  c.dynamics.buffer_capacity = 20000;
  c.dynamics.fit_epochs = 2;
  c.dynamics.batch_size = 256;
  c.dynamics.adam.step_size = 1e-3;
  c.bc.epochs = 5;
  // No failure termination here, so the raw (mostly negative) surprise is used as is.
  c.center_intrinsic = false;
  return c;
}

ExperimentConfig cartpole_base() {
  ExperimentConfig c;
  c.teacher_env = envs::EnvParams::cartpole_swingup();
  c.student_env = envs::EnvParams::cartpole_swingup();
  c.weights = {0.001, 0.001};
  c.epochs = 40;
  c.steps_per_epoch = 3000;
  c.demo_steps = 1000;
  c.student_rollout_steps = 1000;
  c.eval_episodes = 3;
  c.warmup_steps = 5000;
  c.dynamics.buffer_capacity = 20000;
  c.dynamics.fit_epochs = 2;
  c.dynamics.batch_size = 256;
  c.bc.epochs = 5;
  return c;
}

const std::vector<std::pair<std::string, std::function<ExperimentConfig()>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<ExperimentConfig()>>> table = {
      {"mountaincar-homogeneous", [] { return mountain_car_base(); }},
      {"cartpole-homogeneous", [] { return cartpole_base(); }},
      {"mountaincar-hetero-power",
       [] {
         auto c = mountain_car_base();
         c.teacher_env.power = 0.001;
         c.student_env.power = 0.0067;
         return c;
       }},
      {"mountaincar-hetero-power-textintent",
       [] {
         auto c = mountain_car_base();
         c.teacher_env.power = 0.001;
         c.student_env.power = 0.00067;
         return c;
       }},
      {"cartpole-hetero-xlimit",
       [] {
         auto c = cartpole_base();
         c.teacher_env.x_limit = 3.6;
         c.student_env.x_limit = 2.4;
         return c;
       }},
      {"cartpole-hetero-polemass",
       [] {
         auto c = cartpole_base();
         c.teacher_env.pole_mass = 0.1;
         c.student_env.pole_mass = 0.12;
         return c;
       }},
      {"cartpole-sweep-etaS",
       [] {
         auto c = cartpole_base();
         c.teacher_env.x_limit = 3.6;
         c.student_env.x_limit = 2.4;
         c.weights.eta0_S = 0.005;
         return c;
       }},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, make] : registry()) out.push_back(name);
  return out;
}

ExperimentConfig preset(std::string_view name) {
  for (const auto& [n, make] : registry()) {
    if (n == name) {
      auto c = make();
      c.name = n;
      return c;
    }
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace steach::cli
