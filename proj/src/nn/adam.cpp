#include "steach/nn/adam.hpp"

#include <cmath>
#include <string>

#include "steach/common/error.hpp"

namespace steach::nn {

void AdamConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("adam: step_size must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("adam: beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("adam: beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be > 0");
}

OptimizerState OptimizerState::zeros(Eigen::Index n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
}

bool operator==(const OptimizerState& a, const OptimizerState& b) {
  return a.step_count == b.step_count && a.first_moment.size() == b.first_moment.size() &&
         a.first_moment == b.first_moment && a.second_moment == b.second_moment;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, OptimizerState& state,
               const AdamConfig& config) {
  config.validate();
  if (grads.size() != params.size()) throw ShapeError("adam: gradient length does not match parameters");
  if (state.first_moment.size() == 0 && state.step_count == 0) state = OptimizerState::zeros(params.size());
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw ShapeError("adam: optimizer state length does not match parameters");
  }
  for (Eigen::Index i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("adam: non-finite gradient at parameter index " + std::to_string(i));
    }
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  state.first_moment = config.beta1 * state.first_moment + (1.0 - config.beta1) * grads;
  state.second_moment =
      config.beta2 * state.second_moment + (1.0 - config.beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  params.array() -= config.step_size * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + config.epsilon);
}

std::pair<MlpParams, OptimizerState> optimizer_step(const MlpParams& params, const MlpParams& grads,
                                                    const OptimizerState& state,
                                                    const AdamConfig& config) {
  Eigen::VectorXd flat = flatten(params);
  OptimizerState next = state;
  adam_step(flat, flatten(grads), next, config);
  return {unflatten(params, flat), std::move(next)};
}

}  // namespace steach::nn
