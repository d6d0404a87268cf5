#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <utility>

#include "steach/nn/mlp.hpp"

namespace steach::nn {

struct AdamConfig {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct OptimizerState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::uint64_t step_count = 0;

  static OptimizerState zeros(Eigen::Index n);
  friend bool operator==(const OptimizerState& a, const OptimizerState& b);
};

/// In-place adaptive-moment descent step on a flat parameter vector.
/// Throws NumericError naming the first non-finite gradient index.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, OptimizerState& state,
               const AdamConfig& config);

/// Value-semantics variant over network-shaped parameters and gradients.
std::pair<MlpParams, OptimizerState> optimizer_step(const MlpParams& params, const MlpParams& grads,
                                                    const OptimizerState& state,
                                                    const AdamConfig& config);

}  // namespace steach::nn
