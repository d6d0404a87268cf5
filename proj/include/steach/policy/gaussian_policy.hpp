#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "steach/common/rng.hpp"
#include "steach/envs/features.hpp"
#include "steach/nn/mlp.hpp"

namespace steach::policy {

/// Diagonal Gaussian policy with a state-independent learnable log std.
///
/// The mean network reads envs::features(feature_map, s). Log-probabilities
/// refer to the sampled (pre-clip) action; clipping to the action box happens
/// only inside the environment. Flat parameters are the mean network's flat
/// vector followed by log_std.
struct GaussianPolicy {
  static constexpr double kLogStdMin = -5.0;
  static constexpr double kLogStdMax = 2.0;

  nn::MlpParams mean_net;
  Eigen::VectorXd log_std;
  Eigen::VectorXd action_low;
  Eigen::VectorXd action_high;
  envs::FeatureMap feature_map = envs::FeatureMap::Identity;

  static GaussianPolicy create(int state_dim, int action_dim, const std::vector<int>& hidden,
                               envs::FeatureMap feature_map, const Eigen::VectorXd& action_low,
                               const Eigen::VectorXd& action_high, double init_log_std,
                               std::uint64_t seed);

  int action_dim() const { return static_cast<int>(log_std.size()); }
  Eigen::Index parameter_count() const { return mean_net.parameter_count() + log_std.size(); }
  Eigen::VectorXd flat_params() const;
  /// Assigns from a flat vector; log_std is clamped into [kLogStdMin, kLogStdMax].
  void set_flat_params(const Eigen::VectorXd& flat);
  Eigen::MatrixXd features(const Eigen::MatrixXd& states) const {
    return envs::features_batch(feature_map, states);
  }

  friend bool operator==(const GaussianPolicy&, const GaussianPolicy&) = default;
};

struct ActResult {
  Eigen::VectorXd action;
  double log_prob = 0.0;
};

/// Samples a ~ N(mu(s), exp(log_std)^2). Throws NumericError on a non-finite mean.
ActResult act(const GaussianPolicy& policy, const Eigen::VectorXd& s, Rng& rng);
Eigen::VectorXd mean_action(const GaussianPolicy& policy, const Eigen::VectorXd& s);
double log_prob(const GaussianPolicy& policy, const Eigen::VectorXd& s, const Eigen::VectorXd& a);

// Batched routines take precomputed features (one column per sample).

Eigen::VectorXd log_prob_batch(const GaussianPolicy& policy, const Eigen::MatrixXd& features,
                               const Eigen::MatrixXd& actions);

/// sum_i weights_i * grad_theta log pi(a_i | s_i), flat layout.
Eigen::VectorXd log_prob_grad(const GaussianPolicy& policy, const Eigen::MatrixXd& features,
                              const Eigen::MatrixXd& actions, const Eigen::VectorXd& weights);

/// Mean over samples of KL(old(.|s) || next(.|s)).
double mean_kl(const GaussianPolicy& old_policy, const GaussianPolicy& next_policy,
               const Eigen::MatrixXd& features);

/// Hessian of mean_kl(policy, .) at `policy` times v.
Eigen::VectorXd fisher_vector_product(const GaussianPolicy& policy, const Eigen::MatrixXd& features,
                                      const Eigen::VectorXd& v);

}  // namespace steach::policy
