#include "steach/policy/categorical_policy.hpp"

#include <cmath>

#include "steach/common/error.hpp"

namespace steach::policy {

namespace {

Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out = logits;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double m = out.col(j).maxCoeff();
    const double lse = m + std::log((out.col(j).array() - m).exp().sum());
    out.col(j).array() -= lse;
  }
  return out;
}

int action_index(const CategoricalPolicy& p, double encoded) {
  const int k = static_cast<int>(std::lround(encoded));
  if (k < 0 || k >= p.num_actions() || static_cast<double>(k) != encoded) {
    throw ShapeError("categorical policy: invalid action index");
  }
  return k;
}

}  // namespace

CategoricalPolicy CategoricalPolicy::create(int state_dim, int num_actions, const std::vector<int>& hidden,
                                            envs::FeatureMap feature_map, std::uint64_t seed) {
  if (num_actions < 2) throw ConfigError("categorical policy: need at least two actions");
  std::vector<int> sizes{envs::feature_dim(feature_map, state_dim)};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(num_actions);
  CategoricalPolicy p;
  p.logits_net = nn::init_params(sizes, seed);
  p.feature_map = feature_map;
  return p;
}

Eigen::VectorXd action_probabilities(const CategoricalPolicy& policy, const Eigen::VectorXd& s) {
  const Eigen::MatrixXd f = envs::features_batch(policy.feature_map, Eigen::MatrixXd(s));
  return log_softmax(nn::forward_batch(policy.logits_net, f)).col(0).array().exp().matrix();
}

CategoricalAct act(const CategoricalPolicy& policy, const Eigen::VectorXd& s, Rng& rng) {
  const Eigen::VectorXd probs = action_probabilities(policy, s);
  if (!probs.allFinite()) throw NumericError("categorical act: non-finite probabilities");
  const double u = rng.uniform();
  double acc = 0.0;
  int k = static_cast<int>(probs.size()) - 1;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) {
      k = static_cast<int>(i);
      break;
    }
  }
  return {k, std::log(probs[k])};
}

Eigen::VectorXd log_prob_batch(const CategoricalPolicy& policy, const Eigen::MatrixXd& features,
                               const Eigen::MatrixXd& actions) {
  if (actions.rows() != 1 || actions.cols() != features.cols()) throw ShapeError("categorical: action batch shape");
  const Eigen::MatrixXd lp = log_softmax(nn::forward_batch(policy.logits_net, features));
  Eigen::VectorXd out(features.cols());
  for (Eigen::Index j = 0; j < out.size(); ++j) out[j] = lp(action_index(policy, actions(0, j)), j);
  return out;
}

Eigen::VectorXd log_prob_grad(const CategoricalPolicy& policy, const Eigen::MatrixXd& features,
                              const Eigen::MatrixXd& actions, const Eigen::VectorXd& weights) {
  if (actions.rows() != 1 || actions.cols() != features.cols() || weights.size() != features.cols()) {
    throw ShapeError("categorical: batch shape mismatch");
  }
  nn::ForwardCache cache;
  const Eigen::MatrixXd probs =
      log_softmax(nn::forward_batch(policy.logits_net, features, &cache)).array().exp().matrix();
  // d log p_k / d logits = onehot(k) - probs
  Eigen::MatrixXd upstream = -probs;
  for (Eigen::Index j = 0; j < upstream.cols(); ++j) {
    upstream(action_index(policy, actions(0, j)), j) += 1.0;
    upstream.col(j) *= weights[j];
  }
  Eigen::VectorXd grad;
  nn::backward_batch(policy.logits_net, cache, upstream, grad);
  return grad;
}

double mean_kl(const CategoricalPolicy& old_policy, const CategoricalPolicy& next_policy,
               const Eigen::MatrixXd& features) {
  const Eigen::MatrixXd lp_old = log_softmax(nn::forward_batch(old_policy.logits_net, features));
  const Eigen::MatrixXd lp_new = log_softmax(nn::forward_batch(next_policy.logits_net, features));
  return (lp_old.array().exp() * (lp_old - lp_new).array()).sum() / static_cast<double>(features.cols());
}

Eigen::VectorXd fisher_vector_product(const CategoricalPolicy& policy, const Eigen::MatrixXd& features,
                                      const Eigen::VectorXd& v) {
  nn::ForwardCache cache;
  const Eigen::MatrixXd probs =
      log_softmax(nn::forward_batch(policy.logits_net, features, &cache)).array().exp().matrix();
  const Eigen::MatrixXd jv = nn::jvp_batch(policy.logits_net, cache, v);
  // (diag(p) - p p^T) jv per sample
  Eigen::MatrixXd upstream = probs.cwiseProduct(jv);
  const Eigen::RowVectorXd pj = upstream.colwise().sum();
  upstream -= probs * pj.asDiagonal();
  upstream /= static_cast<double>(features.cols());
  Eigen::VectorXd out;
  nn::backward_batch(policy.logits_net, cache, upstream, out);
  return out;
}

}  // namespace steach::policy
