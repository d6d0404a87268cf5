#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace steach::nn {

enum class Activation { Tanh, Identity };

/// Dense feed-forward network: tanh hidden layers, identity output layer.
///
/// `weights[k]` has one row per output unit of layer k. The flat parameter
/// layout used by optimizers and checkpoints is, per layer in order, the
/// weight matrix in column-major order followed by the bias vector.
struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Activation hidden_activation = Activation::Tanh;

  std::size_t num_layers() const { return weights.size(); }
  Eigen::Index input_dim() const { return weights.front().cols(); }
  Eigen::Index output_dim() const { return weights.back().rows(); }
  Eigen::Index parameter_count() const;
  std::vector<int> layer_sizes() const;

  /// Checks the chaining and finiteness invariants; throws ShapeError/NumericError.
  void validate() const;

  friend bool operator==(const MlpParams& a, const MlpParams& b);
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
/// Throws ConfigError unless there are >= 2 positive sizes.
MlpParams init_params(std::span<const int> layer_sizes, std::uint64_t seed);

/// Sum over k of (n_k * n_{k+1} + n_{k+1}).
Eigen::Index parameter_count(std::span<const int> layer_sizes);

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& input);

struct MlpGradient {
  MlpParams param_grads;
  Eigen::VectorXd input_grad;
};

/// Reverse-mode derivative of upstream . forward(params, input).
MlpGradient gradient(const MlpParams& params, const Eigen::VectorXd& input,
                     const Eigen::VectorXd& upstream);

// Batched evaluation; every matrix holds one sample per column.

struct ForwardCache {
  /// activations[0] is the input, activations[k] the output of layer k-1.
  std::vector<Eigen::MatrixXd> activations;
};

Eigen::MatrixXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs,
                              ForwardCache* cache = nullptr);

/// Backpropagates `upstream` (output_dim x N) through a cached forward pass.
/// Adds the batch-summed parameter gradient into `flat_grad` (resized and
/// zeroed if empty) and returns the input gradient (input_dim x N).
Eigen::MatrixXd backward_batch(const MlpParams& params, const ForwardCache& cache,
                               const Eigen::MatrixXd& upstream, Eigen::VectorXd& flat_grad);

/// Forward-mode directional derivative of the outputs with respect to the
/// parameters along `flat_tangent`, per sample (output_dim x N).
Eigen::MatrixXd jvp_batch(const MlpParams& params, const ForwardCache& cache,
                          const Eigen::VectorXd& flat_tangent);

Eigen::VectorXd flatten(const MlpParams& params);
/// Overwrites the parameters of `params` from a flat vector of matching length.
void assign_flat(MlpParams& params, const Eigen::VectorXd& flat);
/// Same shape as `like`, values from `flat`.
MlpParams unflatten(const MlpParams& like, const Eigen::VectorXd& flat);

}  // namespace steach::nn
