#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "steach/dynamics/model.hpp"
#include "steach/policy/trajectory.hpp"

namespace steach::surprise {

/// Predefined surprise constants eta0_T (exploration) and eta0_S (student).
struct SurpriseWeights {
  double eta0_T = 0.001;
  double eta0_S = 0.001;

  void validate() const;
  friend bool operator==(const SurpriseWeights&, const SurpriseWeights&) = default;
};

/// -log P_T(s_next | s, a) under the Teacher model, full Gaussian density.
double teacher_surprise(const dynamics::GaussianDynamicsModel& model_T, const Eigen::VectorXd& s,
                        const Eigen::VectorXd& a, const Eigen::VectorXd& s_next);

/// KL(P_T(.|s,a) || P_S(.|s,a)) in closed form.
double student_surprise(const dynamics::GaussianDynamicsModel& model_T,
                        const dynamics::GaussianDynamicsModel& model_S, const Eigen::VectorXd& s,
                        const Eigen::VectorXd& a);

Eigen::VectorXd teacher_surprise_batch(const dynamics::GaussianDynamicsModel& model_T,
                                       const Eigen::MatrixXd& s, const Eigen::MatrixXd& a,
                                       const Eigen::MatrixXd& s_next);
Eigen::VectorXd student_surprise_batch(const dynamics::GaussianDynamicsModel& model_T,
                                       const dynamics::GaussianDynamicsModel& model_S,
                                       const Eigen::MatrixXd& s, const Eigen::MatrixXd& a);

/// eta0 / max(1, mean(rewards)). Throws UsageError on an empty list.
double eta(double eta0, std::span<const double> extrinsic_rewards);

struct ShapedTransition {
  policy::Transition base;
  double r_int = 0.0;
  double teacher_surprise = 0.0;
  double student_surprise = 0.0;
  double eta_T_used = 0.0;
  double eta_S_used = 0.0;

  double total_reward() const { return base.r_ext + r_int; }
};

using ShapedTrajectory = std::vector<ShapedTransition>;

/// Annotates every transition with both surprises and
/// r_int = eta_T * teacher_surprise - eta_S * student_surprise, where the
/// etas come from the two reward lists via eta(). Surprises are evaluated at
/// the executed (clipped) action.
ShapedTrajectory shape_trajectory(const policy::Trajectory& traj,
                                  const dynamics::GaussianDynamicsModel& model_T,
                                  const dynamics::GaussianDynamicsModel& model_S,
                                  const SurpriseWeights& weights,
                                  std::span<const double> teacher_rollout_rewards,
                                  std::span<const double> student_rollout_rewards);

/// shape_trajectory over a whole rollout batch with one eta pair.
std::vector<ShapedTrajectory> shape_rollout(const std::vector<policy::Trajectory>& trajs,
                                            const dynamics::GaussianDynamicsModel& model_T,
                                            const dynamics::GaussianDynamicsModel& model_S,
                                            const SurpriseWeights& weights,
                                            std::span<const double> teacher_rollout_rewards,
                                            std::span<const double> student_rollout_rewards);

}  // namespace steach::surprise
