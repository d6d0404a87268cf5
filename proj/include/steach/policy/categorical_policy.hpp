#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "steach/common/rng.hpp"
#include "steach/envs/features.hpp"
#include "steach/nn/mlp.hpp"

namespace steach::policy {

/// Softmax policy over `num_actions` discrete choices. Actions are encoded as
/// a 1-vector holding the choice index, so it plugs into the same batch
/// routines as GaussianPolicy and can be optimized by trpo_update.
struct CategoricalPolicy {
  nn::MlpParams logits_net;
  envs::FeatureMap feature_map = envs::FeatureMap::Identity;

  static CategoricalPolicy create(int state_dim, int num_actions, const std::vector<int>& hidden,
                                  envs::FeatureMap feature_map, std::uint64_t seed);

  int num_actions() const { return static_cast<int>(logits_net.output_dim()); }
  Eigen::Index parameter_count() const { return logits_net.parameter_count(); }
  Eigen::VectorXd flat_params() const { return nn::flatten(logits_net); }
  void set_flat_params(const Eigen::VectorXd& flat) { nn::assign_flat(logits_net, flat); }
  Eigen::MatrixXd features(const Eigen::MatrixXd& states) const {
    return envs::features_batch(feature_map, states);
  }

  friend bool operator==(const CategoricalPolicy&, const CategoricalPolicy&) = default;
};

struct CategoricalAct {
  int action = 0;
  double log_prob = 0.0;
};

CategoricalAct act(const CategoricalPolicy& policy, const Eigen::VectorXd& s, Rng& rng);
Eigen::VectorXd action_probabilities(const CategoricalPolicy& policy, const Eigen::VectorXd& s);

Eigen::VectorXd log_prob_batch(const CategoricalPolicy& policy, const Eigen::MatrixXd& features,
                               const Eigen::MatrixXd& actions);
Eigen::VectorXd log_prob_grad(const CategoricalPolicy& policy, const Eigen::MatrixXd& features,
                              const Eigen::MatrixXd& actions, const Eigen::VectorXd& weights);
double mean_kl(const CategoricalPolicy& old_policy, const CategoricalPolicy& next_policy,
               const Eigen::MatrixXd& features);
Eigen::VectorXd fisher_vector_product(const CategoricalPolicy& policy, const Eigen::MatrixXd& features,
                                      const Eigen::VectorXd& v);

}  // namespace steach::policy
