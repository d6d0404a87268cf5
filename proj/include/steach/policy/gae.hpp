#pragma once

#include <Eigen/Core>

#include <vector>

#include "steach/policy/trajectory.hpp"
#include "steach/policy/value_function.hpp"

namespace steach::policy {

struct AdvantageResult {
  Eigen::VectorXd raw_advantages;  // before normalization
  Eigen::VectorXd advantages;      // zero mean, unit variance over the batch
  Eigen::VectorXd value_targets;   // raw_advantages + V(s)
};

/// Generalized advantage estimation over `rewards` (one list per trajectory,
/// aligned with its steps). Goal/constraint endings bootstrap with 0; horizon
/// endings and partial episodes bootstrap with V of the last next-state.
AdvantageResult gae_advantages(const std::vector<Trajectory>& trajs, const ValueFunction& value_fn,
                               double gamma, double lambda, const std::vector<std::vector<double>>& rewards);

/// Same recursion with externally supplied values; `values[i]` holds V for
/// every state of trajectory i and `bootstrap[i]` the value after its last step.
AdvantageResult gae_from_values(const std::vector<Trajectory>& trajs, const std::vector<Eigen::VectorXd>& values,
                                const std::vector<double>& bootstrap, double gamma, double lambda,
                                const std::vector<std::vector<double>>& rewards);

}  // namespace steach::policy
