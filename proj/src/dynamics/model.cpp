#include "steach/dynamics/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "steach/common/error.hpp"

namespace steach::dynamics {

namespace {

constexpr double kMinNormalizerStd = 1e-6;

Eigen::MatrixXd normalized_inputs(const GaussianDynamicsModel& model, const Eigen::MatrixXd& s,
                                  const Eigen::MatrixXd& a) {
  if (s.rows() != model.state_dim || a.rows() != model.action_dim || s.cols() != a.cols()) {
    throw ShapeError("dynamics model: expected (" + std::to_string(model.state_dim) + ", " +
                     std::to_string(model.action_dim) + ")-dimensional inputs, got (" +
                     std::to_string(s.rows()) + ", " + std::to_string(a.rows()) + ")");
  }
  Eigen::MatrixXd in(model.state_dim + model.action_dim, s.cols());
  in.topRows(model.state_dim) = s;
  in.bottomRows(model.action_dim) = a;
  in.colwise() -= model.input_normalizer.mean;
  in.array().colwise() /= model.input_normalizer.std.array();
  return in;
}

}  // namespace

Normalizer Normalizer::identity(Eigen::Index dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

GaussianDynamicsModel GaussianDynamicsModel::create(int state_dim, int action_dim,
                                                    const std::vector<int>& hidden, Owner owner,
                                                    std::uint64_t seed, double logvar_min,
                                                    double logvar_max) {
  if (state_dim <= 0 || action_dim <= 0) throw ConfigError("dynamics model: dimensions must be positive");
  if (!(logvar_min < logvar_max)) throw ConfigError("dynamics model: logvar_min must be < logvar_max");
  if (logvar_min > 0.0 || logvar_max < 0.0) {
    throw ConfigError("dynamics model: log-variance bounds must bracket 0");
  }
  std::vector<int> sizes;
  sizes.push_back(state_dim + action_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(2 * state_dim);

  GaussianDynamicsModel m;
  m.state_dim = state_dim;
  m.action_dim = action_dim;
  m.trunk = nn::init_params(sizes, seed);
  m.trunk.weights.back().setZero();
  m.trunk.biases.back().setZero();
  m.input_normalizer = Normalizer::identity(state_dim + action_dim);
  m.owner = owner;
  m.logvar_min = logvar_min;
  m.logvar_max = logvar_max;
  return m;
}

BatchPrediction predict_batch(const GaussianDynamicsModel& model, const Eigen::MatrixXd& s,
                              const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd out = nn::forward_batch(model.trunk, normalized_inputs(model, s, a));
  BatchPrediction p;
  p.mean = s + out.topRows(model.state_dim);
  p.log_variance = out.bottomRows(model.state_dim).cwiseMax(model.logvar_min).cwiseMin(model.logvar_max);
  return p;
}

DiagonalGaussian predict(const GaussianDynamicsModel& model, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& a) {
  const auto p = predict_batch(model, Eigen::MatrixXd(s), Eigen::MatrixXd(a));
  return {p.mean.col(0), p.log_variance.col(0).array().exp().matrix()};
}

NllResult nll_loss(const GaussianDynamicsModel& model, const Eigen::MatrixXd& s,
                   const Eigen::MatrixXd& a, const Eigen::MatrixXd& s_next) {
  if (s.cols() == 0) throw UsageError("nll_loss: empty batch");
  if (s_next.rows() != model.state_dim || s_next.cols() != s.cols()) {
    throw ShapeError("nll_loss: next-state batch shape mismatch");
  }
  const int sd = model.state_dim;
  nn::ForwardCache cache;
  const Eigen::MatrixXd out = nn::forward_batch(model.trunk, normalized_inputs(model, s, a), &cache);
  const Eigen::ArrayXXd raw_lv = out.bottomRows(sd).array();
  const Eigen::ArrayXXd lv = raw_lv.cwiseMax(model.logvar_min).cwiseMin(model.logvar_max);
  const Eigen::ArrayXXd resid = (s + out.topRows(sd) - s_next).array();
  const Eigen::ArrayXXd inv_var = (-lv).exp();

  NllResult result;
  result.loss = (resid.square() * inv_var + lv).sum();

  Eigen::MatrixXd upstream(2 * sd, s.cols());
  upstream.topRows(sd) = (2.0 * resid * inv_var).matrix();
  const Eigen::ArrayXXd inside =
      ((raw_lv > model.logvar_min) && (raw_lv < model.logvar_max)).cast<double>();
  upstream.bottomRows(sd) = ((1.0 - resid.square() * inv_var) * inside).matrix();
  nn::backward_batch(model.trunk, cache, upstream, result.gradient);
  return result;
}

double mean_buffer_loss(const GaussianDynamicsModel& model, const TransitionBuffer& buffer) {
  if (buffer.empty()) throw UsageError("mean_buffer_loss: empty buffer");
  constexpr std::size_t kChunk = 4096;
  double total = 0.0;
  Eigen::MatrixXd s, a, s_next;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < buffer.size(); start += kChunk) {
    const std::size_t end = std::min(buffer.size(), start + kChunk);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    buffer.gather(idx, s, a, s_next);
    const auto p = predict_batch(model, s, a);
    total += ((p.mean - s_next).array().square() * (-p.log_variance.array()).exp() +
              p.log_variance.array())
                 .sum();
  }
  return total / static_cast<double>(buffer.size());
}

namespace {

Normalizer normalizer_from(const TransitionBuffer& buffer) {
  const int dim = buffer.state_dim() + buffer.action_dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd row(dim);
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    row << buffer.state(i), buffer.action(i);
    sum += row;
  }
  const double n = static_cast<double>(buffer.size());
  const Eigen::VectorXd mean = sum / n;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    row << buffer.state(i), buffer.action(i);
    sq += (row - mean).cwiseAbs2();
  }
  Normalizer norm;
  norm.mean = mean;
  norm.std = (sq / n).cwiseSqrt().cwiseMax(kMinNormalizerStd);
  return norm;
}

}  // namespace

FitReport fit(GaussianDynamicsModel& model, const TransitionBuffer& buffer, const FitOptions& options,
              nn::OptimizerState& optimizer, Rng& rng) {
  if (buffer.empty()) throw UsageError("fit: transition buffer is empty");
  if (buffer.owner() != model.owner) {
    throw UsageError("fit: " + std::string(to_string(model.owner)) + " model cannot be fit on " +
                     std::string(to_string(buffer.owner())) + " transitions");
  }
  if (buffer.state_dim() != model.state_dim || buffer.action_dim() != model.action_dim) {
    throw ShapeError("fit: buffer dimensions do not match the model");
  }
  if (options.epochs < 0 || options.batch_size <= 0) throw ConfigError("fit: epochs >= 0 and batch_size > 0 required");

  model.input_normalizer = normalizer_from(buffer);

  FitReport report;
  if (options.report_buffer_loss) report.buffer_loss_before = mean_buffer_loss(model, buffer);

  Eigen::VectorXd params = nn::flatten(model.trunk);
  std::vector<std::size_t> order(buffer.size());
  std::vector<std::size_t> batch;
  Eigen::MatrixXd s, a, s_next;
  const auto bs = static_cast<std::size_t>(options.batch_size);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                   order.begin() + static_cast<std::ptrdiff_t>(end));
      buffer.gather(batch, s, a, s_next);
      auto nll = nll_loss(model, s, a, s_next);
      if (!std::isfinite(nll.loss)) {
        throw NumericError("fit: non-finite loss at epoch " + std::to_string(epoch) + " batch index " +
                           std::to_string(report.batches));
      }
      const double n = static_cast<double>(batch.size());
      epoch_loss += nll.loss;
      nll.gradient /= n;
      nn::adam_step(params, nll.gradient, optimizer, options.adam);
      nn::assign_flat(model.trunk, params);
      ++report.batches;
    }
    report.last_epoch_mean_loss = epoch_loss / static_cast<double>(order.size());
  }
  if (options.report_buffer_loss) report.buffer_loss_after = mean_buffer_loss(model, buffer);
  return report;
}

}  // namespace steach::dynamics
