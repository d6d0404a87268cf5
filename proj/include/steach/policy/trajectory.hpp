#pragma once

#include <Eigen/Core>

#include <vector>

#include "steach/envs/env.hpp"

namespace steach::policy {

struct Transition {
  Eigen::VectorXd s;
  Eigen::VectorXd action;          // sampled, pre-clip; log_prob refers to this
  Eigen::VectorXd applied_action;  // what the environment executed
  double r_ext = 0.0;
  Eigen::VectorXd s_next;
  bool done = false;
  double log_prob = 0.0;
};

/// One episode, possibly cut short by the rollout step budget.
struct Trajectory {
  std::vector<Transition> steps;
  envs::DoneReason done_reason = envs::DoneReason::None;
  /// False for the final partial episode of a rollout batch.
  bool complete = false;

  std::size_t length() const { return steps.size(); }
  double extrinsic_return() const;
  /// True if the last state should be bootstrapped with 0 (goal or constraint).
  bool terminal() const {
    return complete && (done_reason == envs::DoneReason::Goal || done_reason == envs::DoneReason::Constraint);
  }
};

/// Per-transition extrinsic rewards of every trajectory, concatenated.
std::vector<double> extrinsic_rewards(const std::vector<Trajectory>& trajs);
std::size_t total_steps(const std::vector<Trajectory>& trajs);

}  // namespace steach::policy
