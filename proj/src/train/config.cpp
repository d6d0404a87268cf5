#include "steach/train/config.hpp"

#include <string>

#include "steach/common/error.hpp"

namespace steach::train {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Full: return "full";
    case Mode::SurpriseMaxBaseline: return "surprise_max_baseline";
    case Mode::Plain: return "plain";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "full") return Mode::Full;
  if (text == "surprise_max_baseline" || text == "surprise-max") return Mode::SurpriseMaxBaseline;
  if (text == "plain") return Mode::Plain;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected full, surprise-max or plain)");
}

envs::FeatureMap feature_map_for(envs::EnvFamily family) {
  return family == envs::EnvFamily::MountainCar ? envs::FeatureMap::MountainCar : envs::FeatureMap::CartPole;
}

surprise::SurpriseWeights ExperimentConfig::effective_weights() const {
  surprise::SurpriseWeights w = weights;
  if (mode == Mode::SurpriseMaxBaseline) w.eta0_S = 0.0;
  if (mode == Mode::Plain) w = {0.0, 0.0};
  return w;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(epochs >= 1, "epochs must be >= 1");
  require(steps_per_epoch >= 1, "steps_per_epoch must be >= 1");
  require(demo_steps >= 1, "demo_steps must be >= 1");
  require(student_rollout_steps >= 1, "student_rollout_steps must be >= 1");
  require(eval_episodes >= 1, "eval_episodes must be >= 1");
  require(warmup_steps >= 1, "warmup_steps must be >= 1");
  require(demo_dump_every >= 0, "demo_dump_every must be >= 0");
  require(checkpoint_every >= 0, "checkpoint_every must be >= 0");
  teacher_env.validate();
  student_env.validate();
  require(envs::space_info(teacher_env).state_dim == envs::space_info(student_env).state_dim &&
              teacher_env.family == student_env.family,
          "teacher_env and student_env must be the same environment family");
  weights.validate();
  auto hidden_ok = [](const std::vector<int>& h) {
    for (int n : h)
      if (n <= 0) return false;
    return true;
  };
  require(hidden_ok(networks.dynamics_hidden), "networks.dynamics_hidden sizes must be positive");
  require(hidden_ok(networks.policy_hidden), "networks.policy_hidden sizes must be positive");
  require(hidden_ok(networks.value_hidden), "networks.value_hidden sizes must be positive");
  require(dynamics.buffer_capacity >= 1, "dynamics.buffer_capacity must be >= 1");
  require(dynamics.fit_epochs >= 0, "dynamics.fit_epochs must be >= 0");
  require(dynamics.batch_size >= 1, "dynamics.batch_size must be >= 1");
  require(dynamics.logvar_min < dynamics.logvar_max && dynamics.logvar_min <= 0.0 && dynamics.logvar_max >= 0.0,
          "dynamics log-variance bounds must satisfy logvar_min <= 0 <= logvar_max, min < max");
  dynamics.adam.validate();
  teacher.trpo.validate();
  require(teacher.gamma >= 0.0 && teacher.gamma <= 1.0, "trpo.gamma must lie in [0, 1]");
  require(teacher.lambda >= 0.0 && teacher.lambda <= 1.0, "trpo.lambda must lie in [0, 1]");
  require(value.epochs >= 0 && value.batch_size >= 1, "value.epochs >= 0 and value.batch_size >= 1 required");
  value.adam.validate();
  require(bc.epochs >= 0 && bc.batch_size >= 1, "bc.epochs >= 0 and bc.batch_size >= 1 required");
  bc.adam.validate();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.name == b.name && a.mode == b.mode && a.seed == b.seed && a.epochs == b.epochs &&
         a.steps_per_epoch == b.steps_per_epoch && a.demo_steps == b.demo_steps &&
         a.student_rollout_steps == b.student_rollout_steps && a.eval_episodes == b.eval_episodes &&
         a.warmup_steps == b.warmup_steps && a.demo_dump_every == b.demo_dump_every &&
         a.checkpoint_every == b.checkpoint_every && a.teacher_env == b.teacher_env &&
         a.student_env == b.student_env && a.weights == b.weights && a.center_intrinsic == b.center_intrinsic && a.networks == b.networks &&
         a.dynamics == b.dynamics && a.teacher == b.teacher && a.value.epochs == b.value.epochs &&
         a.value.batch_size == b.value.batch_size && a.value.adam == b.value.adam && a.bc == b.bc;
}

}  // namespace steach::train
