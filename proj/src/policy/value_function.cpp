#include "steach/policy/value_function.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "steach/common/error.hpp"

namespace steach::policy {

ValueFunction ValueFunction::create(int state_dim, const std::vector<int>& hidden, envs::FeatureMap feature_map,
                                    std::uint64_t seed) {
  std::vector<int> sizes{envs::feature_dim(feature_map, state_dim)};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return {nn::init_params(sizes, seed), feature_map};
}

double ValueFunction::value(const Eigen::VectorXd& s) const { return values(Eigen::MatrixXd(s))[0]; }

Eigen::VectorXd ValueFunction::values(const Eigen::MatrixXd& states) const {
  return nn::forward_batch(net, envs::features_batch(feature_map, states)).row(0).transpose();
}

double value_loss(const ValueFunction& value_fn, const Eigen::MatrixXd& states, const Eigen::VectorXd& targets) {
  if (targets.size() != states.cols()) throw ShapeError("value_loss: targets not aligned with states");
  if (states.cols() == 0) throw UsageError("value_loss: empty batch");
  return (value_fn.values(states) - targets).squaredNorm() / static_cast<double>(states.cols());
}

Eigen::VectorXd value_loss_grad(const ValueFunction& value_fn, const Eigen::MatrixXd& states,
                                const Eigen::VectorXd& targets) {
  if (targets.size() != states.cols()) throw ShapeError("value_loss_grad: targets not aligned with states");
  nn::ForwardCache cache;
  const Eigen::MatrixXd v =
      nn::forward_batch(value_fn.net, envs::features_batch(value_fn.feature_map, states), &cache);
  const Eigen::MatrixXd upstream = 2.0 * (v - targets.transpose());
  Eigen::VectorXd grad;
  nn::backward_batch(value_fn.net, cache, upstream, grad);
  return grad;
}

ValueFitReport fit_value(ValueFunction& value_fn, const Eigen::MatrixXd& states, const Eigen::VectorXd& targets,
                         const ValueFitOptions& options, nn::OptimizerState& optimizer, Rng& rng) {
  if (targets.size() != states.cols()) throw ShapeError("fit_value: targets not aligned with states");
  if (options.epochs < 0 || options.batch_size <= 0) throw ConfigError("fit_value: epochs >= 0, batch_size > 0");
  ValueFitReport report;
  if (states.cols() == 0) return report;
  report.loss_before = value_loss(value_fn, states, targets);
  report.loss_after = report.loss_before;
  if (options.epochs == 0) return report;

  Eigen::VectorXd params = nn::flatten(value_fn.net);
  std::vector<std::size_t> order(static_cast<std::size_t>(states.cols()));
  const auto bs = static_cast<std::size_t>(options.batch_size);
  Eigen::MatrixXd s_batch;
  Eigen::VectorXd y_batch;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      const auto m = static_cast<Eigen::Index>(end - start);
      s_batch.resize(states.rows(), m);
      y_batch.resize(m);
      for (Eigen::Index j = 0; j < m; ++j) {
        const auto idx = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(j)]);
        s_batch.col(j) = states.col(idx);
        y_batch[j] = targets[idx];
      }
      Eigen::VectorXd grad = value_loss_grad(value_fn, s_batch, y_batch) / static_cast<double>(m);
      nn::adam_step(params, grad, optimizer, options.adam);
      nn::assign_flat(value_fn.net, params);
    }
    const double loss = value_loss(value_fn, states, targets);
    if (!std::isfinite(loss)) throw NumericError("fit_value: non-finite loss at epoch " + std::to_string(epoch));
    report.epoch_losses.push_back(loss);
  }
  report.loss_after = report.epoch_losses.back();
  return report;
}

}  // namespace steach::policy
