#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "steach/common/rng.hpp"
#include "steach/dynamics/buffer.hpp"
#include "steach/dynamics/gaussian.hpp"
#include "steach/dynamics/owner.hpp"
#include "steach/nn/adam.hpp"
#include "steach/nn/mlp.hpp"

namespace steach::dynamics {

struct Normalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  static Normalizer identity(Eigen::Index dim);
  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

/// Learned transition distribution P(s' | s, a).
///
/// The trunk maps the normalized (s, a) to [mean_delta; raw_log_variance].
/// The reported mean is s + mean_delta; the log-variance is hard-clamped to
/// [logvar_min, logvar_max] (its gradient is zero outside that interval).
/// The final trunk layer starts at zero, so a fresh model predicts N(s, I).
struct GaussianDynamicsModel {
  int state_dim = 0;
  int action_dim = 0;
  nn::MlpParams trunk;
  Normalizer input_normalizer;
  Owner owner = Owner::Teacher;
  double logvar_min = -10.0;
  double logvar_max = 4.0;

  static GaussianDynamicsModel create(int state_dim, int action_dim, const std::vector<int>& hidden,
                                      Owner owner, std::uint64_t seed, double logvar_min = -10.0,
                                      double logvar_max = 4.0);

  friend bool operator==(const GaussianDynamicsModel&, const GaussianDynamicsModel&) = default;
};

struct BatchPrediction {
  Eigen::MatrixXd mean;          // absolute next-state means
  Eigen::MatrixXd log_variance;  // clamped
};

DiagonalGaussian predict(const GaussianDynamicsModel& model, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& a);
BatchPrediction predict_batch(const GaussianDynamicsModel& model, const Eigen::MatrixXd& s,
                              const Eigen::MatrixXd& a);

struct NllResult {
  double loss = 0.0;
  Eigen::VectorXd gradient;  // flat trunk gradient of `loss`
};

/// Sum over the batch of (mu - s')^T Sigma^-1 (mu - s') + log det Sigma.
/// Throws UsageError on an empty batch.
NllResult nll_loss(const GaussianDynamicsModel& model, const Eigen::MatrixXd& s,
                   const Eigen::MatrixXd& a, const Eigen::MatrixXd& s_next);

struct FitOptions {
  int epochs = 20;
  int batch_size = 256;
  nn::AdamConfig adam{};
  /// Also evaluate the mean per-sample loss on the whole buffer before and after.
  bool report_buffer_loss = false;
};

struct FitReport {
  double buffer_loss_before = 0.0;  // only if report_buffer_loss
  double buffer_loss_after = 0.0;   // only if report_buffer_loss
  double last_epoch_mean_loss = 0.0;
  int batches = 0;
};

/// Recomputes the input normalizer from the buffer, then runs shuffled
/// minibatch Adam on the per-sample mean loss. Rejects buffers whose owner
/// differs from the model's.
FitReport fit(GaussianDynamicsModel& model, const TransitionBuffer& buffer, const FitOptions& options,
              nn::OptimizerState& optimizer, Rng& rng);

/// Mean per-sample loss over all of `buffer`.
double mean_buffer_loss(const GaussianDynamicsModel& model, const TransitionBuffer& buffer);


}  // namespace steach::dynamics
