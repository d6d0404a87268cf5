#include "steach/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "steach/common/error.hpp"
#include "steach/common/rng.hpp"

namespace steach::nn {

namespace {

bool is_last(const MlpParams& p, std::size_t k) { return k + 1 == p.num_layers(); }

void apply_hidden(Eigen::MatrixXd& z, Activation act) {
  if (act == Activation::Tanh) z = z.array().tanh().matrix();
}

// Derivative of the hidden activation expressed through its output.
Eigen::ArrayXXd hidden_slope(const Eigen::MatrixXd& out, Activation act) {
  if (act == Activation::Tanh) return 1.0 - out.array().square();
  return Eigen::ArrayXXd::Ones(out.rows(), out.cols());
}

}  // namespace

Eigen::Index MlpParams::parameter_count() const {
  Eigen::Index n = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].size() + biases[k].size();
  return n;
}

std::vector<int> MlpParams::layer_sizes() const {
  std::vector<int> sizes;
  if (weights.empty()) return sizes;
  sizes.push_back(static_cast<int>(weights.front().cols()));
  for (const auto& w : weights) sizes.push_back(static_cast<int>(w.rows()));
  return sizes;
}

void MlpParams::validate() const {
  if (weights.empty() || weights.size() != biases.size()) {
    throw ShapeError("MlpParams: layer lists empty or of unequal length");
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (biases[k].size() != weights[k].rows()) {
      throw ShapeError("MlpParams: bias length mismatch at layer " + std::to_string(k));
    }
    if (k > 0 && weights[k].cols() != weights[k - 1].rows()) {
      throw ShapeError("MlpParams: layer " + std::to_string(k) + " does not chain");
    }
    if (!weights[k].allFinite() || !biases[k].allFinite()) {
      throw NumericError("MlpParams: non-finite entry in layer " + std::to_string(k));
    }
  }
}

bool operator==(const MlpParams& a, const MlpParams& b) {
  if (a.hidden_activation != b.hidden_activation || a.weights.size() != b.weights.size()) return false;
  for (std::size_t k = 0; k < a.weights.size(); ++k) {
    if (a.weights[k].rows() != b.weights[k].rows() || a.weights[k].cols() != b.weights[k].cols())
      return false;
    if (a.weights[k] != b.weights[k] || a.biases[k] != b.biases[k]) return false;
  }
  return true;
}

Eigen::Index parameter_count(std::span<const int> layer_sizes) {
  Eigen::Index n = 0;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    n += static_cast<Eigen::Index>(layer_sizes[k]) * layer_sizes[k + 1] + layer_sizes[k + 1];
  }
  return n;
}

MlpParams init_params(std::span<const int> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    throw ConfigError("init_params: need at least an input and an output layer size");
  }
  for (int n : layer_sizes) {
    if (n <= 0) throw ConfigError("init_params: layer sizes must be positive");
  }
  Rng rng(seed);
  MlpParams p;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    const int fan_in = layer_sizes[k];
    const int fan_out = layer_sizes[k + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-scale, scale);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return p;
}

Eigen::MatrixXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs,
                              ForwardCache* cache) {
  if (inputs.rows() != params.input_dim()) {
    throw ShapeError("forward: input has " + std::to_string(inputs.rows()) + " rows, network expects " +
                     std::to_string(params.input_dim()));
  }
  if (cache) {
    cache->activations.clear();
    cache->activations.reserve(params.num_layers() + 1);
    cache->activations.push_back(inputs);
  }
  Eigen::MatrixXd a = inputs;
  for (std::size_t k = 0; k < params.num_layers(); ++k) {
    Eigen::MatrixXd z = params.weights[k] * a;
    z.colwise() += params.biases[k];
    if (!is_last(params, k)) apply_hidden(z, params.hidden_activation);
    a = std::move(z);
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& input) {
  return forward_batch(params, Eigen::MatrixXd(input));
}

Eigen::MatrixXd backward_batch(const MlpParams& params, const ForwardCache& cache,
                               const Eigen::MatrixXd& upstream, Eigen::VectorXd& flat_grad) {
  const auto L = params.num_layers();
  if (cache.activations.size() != L + 1) throw UsageError("backward: cache does not match network");
  if (upstream.rows() != params.output_dim() || upstream.cols() != cache.activations.front().cols()) {
    throw ShapeError("backward: upstream shape does not match network output batch");
  }
  if (flat_grad.size() == 0) flat_grad = Eigen::VectorXd::Zero(params.parameter_count());
  if (flat_grad.size() != params.parameter_count()) throw ShapeError("backward: gradient buffer size");

  // Offsets of each layer's block in the flat layout.
  std::vector<Eigen::Index> offset(L);
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < L; ++k) {
    offset[k] = off;
    off += params.weights[k].size() + params.biases[k].size();
  }

  Eigen::MatrixXd delta = upstream;
  for (std::size_t k = L; k-- > 0;) {
    const Eigen::MatrixXd& a_in = cache.activations[k];
    const auto& W = params.weights[k];
    Eigen::Map<Eigen::MatrixXd> gW(flat_grad.data() + offset[k], W.rows(), W.cols());
    gW.noalias() += delta * a_in.transpose();
    flat_grad.segment(offset[k] + W.size(), W.rows()) += delta.rowwise().sum();
    Eigen::MatrixXd back = W.transpose() * delta;
    if (k > 0) {
      back.array() *= hidden_slope(a_in, params.hidden_activation);
    }
    delta = std::move(back);
  }
  return delta;
}

MlpGradient gradient(const MlpParams& params, const Eigen::VectorXd& input,
                     const Eigen::VectorXd& upstream) {
  if (upstream.size() != params.output_dim()) {
    throw ShapeError("gradient: upstream length " + std::to_string(upstream.size()) +
                     " != output dimension " + std::to_string(params.output_dim()));
  }
  ForwardCache cache;
  forward_batch(params, Eigen::MatrixXd(input), &cache);
  Eigen::VectorXd flat;
  Eigen::MatrixXd in_grad = backward_batch(params, cache, Eigen::MatrixXd(upstream), flat);
  return {unflatten(params, flat), in_grad.col(0)};
}

Eigen::MatrixXd jvp_batch(const MlpParams& params, const ForwardCache& cache,
                          const Eigen::VectorXd& flat_tangent) {
  const auto L = params.num_layers();
  if (cache.activations.size() != L + 1) throw UsageError("jvp: cache does not match network");
  if (flat_tangent.size() != params.parameter_count()) throw ShapeError("jvp: tangent length");
  const Eigen::Index n = cache.activations.front().cols();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(params.input_dim(), n);
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < L; ++k) {
    const auto& W = params.weights[k];
    Eigen::Map<const Eigen::MatrixXd> dW(flat_tangent.data() + off, W.rows(), W.cols());
    off += W.size();
    const auto db = flat_tangent.segment(off, W.rows());
    off += W.rows();
    Eigen::MatrixXd z = dW * cache.activations[k];
    if (k > 0) z.noalias() += W * t;
    z.colwise() += db;
    if (!is_last(params, k)) z.array() *= hidden_slope(cache.activations[k + 1], params.hidden_activation);
    t = std::move(z);
  }
  return t;
}

Eigen::VectorXd flatten(const MlpParams& params) {
  Eigen::VectorXd flat(params.parameter_count());
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < params.num_layers(); ++k) {
    const auto& W = params.weights[k];
    flat.segment(off, W.size()) = Eigen::Map<const Eigen::VectorXd>(W.data(), W.size());
    off += W.size();
    flat.segment(off, params.biases[k].size()) = params.biases[k];
    off += params.biases[k].size();
  }
  return flat;
}

void assign_flat(MlpParams& params, const Eigen::VectorXd& flat) {
  if (flat.size() != params.parameter_count()) {
    throw ShapeError("assign_flat: expected " + std::to_string(params.parameter_count()) +
                     " values, got " + std::to_string(flat.size()));
  }
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < params.num_layers(); ++k) {
    auto& W = params.weights[k];
    Eigen::Map<Eigen::VectorXd>(W.data(), W.size()) = flat.segment(off, W.size());
    off += W.size();
    params.biases[k] = flat.segment(off, params.biases[k].size());
    off += params.biases[k].size();
  }
}

MlpParams unflatten(const MlpParams& like, const Eigen::VectorXd& flat) {
  MlpParams out = like;
  assign_flat(out, flat);
  return out;
}

}  // namespace steach::nn
