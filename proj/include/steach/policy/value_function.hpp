#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "steach/common/rng.hpp"
#include "steach/envs/features.hpp"
#include "steach/nn/adam.hpp"
#include "steach/nn/mlp.hpp"

namespace steach::policy {

/// State-value baseline V(s) on the same feature map as the policy.
struct ValueFunction {
  nn::MlpParams net;
  envs::FeatureMap feature_map = envs::FeatureMap::Identity;

  static ValueFunction create(int state_dim, const std::vector<int>& hidden, envs::FeatureMap feature_map,
                              std::uint64_t seed);

  double value(const Eigen::VectorXd& s) const;
  /// Values for raw states, one per column.
  Eigen::VectorXd values(const Eigen::MatrixXd& states) const;

  friend bool operator==(const ValueFunction&, const ValueFunction&) = default;
};

struct ValueFitOptions {
  int epochs = 10;
  int batch_size = 64;
  nn::AdamConfig adam{};
};

struct ValueFitReport {
  double loss_before = 0.0;
  double loss_after = 0.0;
  std::vector<double> epoch_losses;  // full-batch mean squared error after each epoch
};

/// Minibatch mean-squared-error regression of V(states) onto targets.
ValueFitReport fit_value(ValueFunction& value_fn, const Eigen::MatrixXd& states,
                         const Eigen::VectorXd& targets, const ValueFitOptions& options,
                         nn::OptimizerState& optimizer, Rng& rng);

double value_loss(const ValueFunction& value_fn, const Eigen::MatrixXd& states, const Eigen::VectorXd& targets);

/// Flat gradient of the summed squared error sum_i (V(s_i) - y_i)^2.
Eigen::VectorXd value_loss_grad(const ValueFunction& value_fn, const Eigen::MatrixXd& states,
                                const Eigen::VectorXd& targets);

}  // namespace steach::policy
