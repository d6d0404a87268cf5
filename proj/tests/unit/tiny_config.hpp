#pragma once

#include "steach/train/config.hpp"

namespace testing {

// A few hundred steps per epoch with small networks; seconds per run.
inline steach::train::ExperimentConfig tiny_config(steach::envs::EnvFamily family = steach::envs::EnvFamily::MountainCar) {
  steach::train::ExperimentConfig c;
  c.name = "tiny";
  c.teacher_env = family == steach::envs::EnvFamily::MountainCar ? steach::envs::EnvParams::mountain_car()
                                                                 : steach::envs::EnvParams::cartpole_swingup();
  c.student_env = c.teacher_env;
  c.epochs = 3;
  c.steps_per_epoch = 200;
  c.demo_steps = 100;
  c.student_rollout_steps = 100;
  c.eval_episodes = 1;
  c.warmup_steps = 200;
  c.demo_dump_every = 1;
  c.networks.dynamics_hidden = {16};
  c.networks.policy_hidden = {8};
  c.networks.value_hidden = {8};
  c.dynamics.buffer_capacity = 1000;
  c.dynamics.fit_epochs = 1;
  c.dynamics.batch_size = 64;
  c.value.epochs = 2;
  c.bc.epochs = 2;
  return c;
}

}  // namespace testing
