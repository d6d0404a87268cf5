#include "steach/policy/gaussian_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "steach/common/error.hpp"

namespace steach::policy {

namespace {

const double kHalfLogTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

void check_actions(const GaussianPolicy& p, const Eigen::MatrixXd& features, const Eigen::MatrixXd& actions) {
  if (actions.rows() != p.action_dim() || actions.cols() != features.cols()) {
    throw ShapeError("gaussian policy: action batch shape mismatch");
  }
}

}  // namespace

GaussianPolicy GaussianPolicy::create(int state_dim, int action_dim, const std::vector<int>& hidden,
                                      envs::FeatureMap feature_map, const Eigen::VectorXd& action_low,
                                      const Eigen::VectorXd& action_high, double init_log_std,
                                      std::uint64_t seed) {
  if (action_low.size() != action_dim || action_high.size() != action_dim) {
    throw ConfigError("gaussian policy: action bounds do not match action_dim");
  }
  std::vector<int> sizes{envs::feature_dim(feature_map, state_dim)};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(action_dim);
  GaussianPolicy p;
  p.mean_net = nn::init_params(sizes, seed);
  p.log_std = Eigen::VectorXd::Constant(action_dim, std::clamp(init_log_std, kLogStdMin, kLogStdMax));
  p.action_low = action_low;
  p.action_high = action_high;
  p.feature_map = feature_map;
  return p;
}

Eigen::VectorXd GaussianPolicy::flat_params() const {
  Eigen::VectorXd flat(parameter_count());
  flat << nn::flatten(mean_net), log_std;
  return flat;
}

void GaussianPolicy::set_flat_params(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) throw ShapeError("gaussian policy: flat parameter length mismatch");
  const Eigen::Index n = mean_net.parameter_count();
  nn::assign_flat(mean_net, flat.head(n));
  log_std = flat.tail(log_std.size()).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

Eigen::VectorXd mean_action(const GaussianPolicy& policy, const Eigen::VectorXd& s) {
  return nn::forward(policy.mean_net, envs::features(policy.feature_map, s));
}

ActResult act(const GaussianPolicy& policy, const Eigen::VectorXd& s, Rng& rng) {
  const Eigen::VectorXd mu = mean_action(policy, s);
  if (!mu.allFinite()) throw NumericError("act: non-finite policy mean");
  ActResult r;
  r.action.resize(mu.size());
  r.log_prob = 0.0;
  for (Eigen::Index d = 0; d < mu.size(); ++d) {
    const double z = rng.normal();
    r.action[d] = mu[d] + std::exp(policy.log_std[d]) * z;
  }
  r.log_prob = log_prob(policy, s, r.action);
  return r;
}

double log_prob(const GaussianPolicy& policy, const Eigen::VectorXd& s, const Eigen::VectorXd& a) {
  const Eigen::MatrixXd f = envs::features_batch(policy.feature_map, Eigen::MatrixXd(s));
  return log_prob_batch(policy, f, Eigen::MatrixXd(a))[0];
}

Eigen::VectorXd log_prob_batch(const GaussianPolicy& policy, const Eigen::MatrixXd& features,
                               const Eigen::MatrixXd& actions) {
  check_actions(policy, features, actions);
  const Eigen::MatrixXd mu = nn::forward_batch(policy.mean_net, features);
  const Eigen::ArrayXd inv_var = (-2.0 * policy.log_std.array()).exp();
  const Eigen::ArrayXXd z2 = (actions - mu).array().square().colwise() * inv_var;
  const double norm = policy.log_std.sum() + kHalfLogTwoPi * static_cast<double>(policy.action_dim());
  return (-0.5 * z2.colwise().sum() - norm).transpose().matrix();
}

Eigen::VectorXd log_prob_grad(const GaussianPolicy& policy, const Eigen::MatrixXd& features,
                              const Eigen::MatrixXd& actions, const Eigen::VectorXd& weights) {
  check_actions(policy, features, actions);
  if (weights.size() != features.cols()) throw ShapeError("log_prob_grad: weight count mismatch");
  nn::ForwardCache cache;
  const Eigen::MatrixXd mu = nn::forward_batch(policy.mean_net, features, &cache);
  const Eigen::ArrayXd inv_var = (-2.0 * policy.log_std.array()).exp();
  const Eigen::ArrayXXd diff = (actions - mu).array();
  const Eigen::ArrayXXd scaled = diff.colwise() * inv_var;  // d log p / d mu
  Eigen::MatrixXd upstream = (scaled.rowwise() * weights.transpose().array()).matrix();

  Eigen::VectorXd grad(policy.parameter_count());
  Eigen::VectorXd net_grad;
  nn::backward_batch(policy.mean_net, cache, upstream, net_grad);
  grad.head(net_grad.size()) = net_grad;
  // d log p / d log_std_d = (a - mu)^2 / var - 1
  const Eigen::ArrayXXd dls = (diff * scaled) - 1.0;
  grad.tail(policy.action_dim()) = (dls.matrix() * weights);
  return grad;
}

double mean_kl(const GaussianPolicy& old_policy, const GaussianPolicy& next_policy,
               const Eigen::MatrixXd& features) {
  if (features.cols() == 0) throw UsageError("mean_kl: empty batch");
  const Eigen::MatrixXd mu_old = nn::forward_batch(old_policy.mean_net, features);
  const Eigen::MatrixXd mu_new = nn::forward_batch(next_policy.mean_net, features);
  const Eigen::ArrayXd ls_old = old_policy.log_std.array();
  const Eigen::ArrayXd ls_new = next_policy.log_std.array();
  const Eigen::ArrayXd inv_var_new = (-2.0 * ls_new).exp();
  const double const_part = (ls_new - ls_old + 0.5 * (2.0 * (ls_old - ls_new)).exp() - 0.5).sum();
  const double mean_part =
      0.5 * ((mu_old - mu_new).array().square().colwise() * inv_var_new).sum() / static_cast<double>(features.cols());
  return const_part + mean_part;
}

Eigen::VectorXd fisher_vector_product(const GaussianPolicy& policy, const Eigen::MatrixXd& features,
                                      const Eigen::VectorXd& v) {
  if (v.size() != policy.parameter_count()) throw ShapeError("fisher_vector_product: vector length mismatch");
  const Eigen::Index n_net = policy.mean_net.parameter_count();
  nn::ForwardCache cache;
  nn::forward_batch(policy.mean_net, features, &cache);
  const Eigen::MatrixXd jv = nn::jvp_batch(policy.mean_net, cache, v.head(n_net));
  const Eigen::ArrayXd inv_var = (-2.0 * policy.log_std.array()).exp();
  const Eigen::MatrixXd upstream = (jv.array().colwise() * inv_var).matrix() / static_cast<double>(features.cols());
  Eigen::VectorXd net_part;
  nn::backward_batch(policy.mean_net, cache, upstream, net_part);
  Eigen::VectorXd out(v.size());
  out.head(n_net) = net_part;
  out.tail(policy.action_dim()) = 2.0 * v.tail(policy.action_dim());
  return out;
}

}  // namespace steach::policy
