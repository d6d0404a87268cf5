#pragma once

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <functional>
#include <sstream>
#include <string>

#include "steach/common/error.hpp"

namespace steach::policy {

struct TrpoConfig {
  double kl_limit = 0.01;
  int cg_iters = 10;
  double backtrack_coeff = 0.5;
  int backtrack_iters = 10;
  double damping = 0.1;
  /// Accepted steps must satisfy measured KL <= kl_accept_factor * kl_limit.
  double kl_accept_factor = 1.5;

  void validate() const;
  friend bool operator==(const TrpoConfig&, const TrpoConfig&) = default;
};

struct TrpoStats {
  bool accepted = false;
  double kl = 0.0;  // measured mean KL(old || returned policy)
  double surrogate_before = 0.0;
  double surrogate_after = 0.0;
  double expected_improvement = 0.0;
  double grad_norm = 0.0;
  int line_search_steps = 0;

  double improvement() const { return surrogate_after - surrogate_before; }
  std::string dump() const;
};

/// Samples for one trust-region step. `states` are raw environment states.
struct TrpoBatch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXd old_log_probs;
};

template <typename P>
struct TrpoResult {
  P policy;
  TrpoStats stats;
};

/// Policies optimizable by trpo_update.
template <typename P>
concept TrustRegionPolicy = requires(const P& cp, P& p, const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
  { cp.flat_params() } -> std::convertible_to<Eigen::VectorXd>;
  p.set_flat_params(v);
  { cp.features(m) } -> std::convertible_to<Eigen::MatrixXd>;
  { log_prob_batch(cp, m, m) } -> std::convertible_to<Eigen::VectorXd>;
  { log_prob_grad(cp, m, m, v) } -> std::convertible_to<Eigen::VectorXd>;
  { mean_kl(cp, cp, m) } -> std::convertible_to<double>;
  { fisher_vector_product(cp, m, v) } -> std::convertible_to<Eigen::VectorXd>;
};

/// Solves A x = b for symmetric positive definite A given as a product.
Eigen::VectorXd conjugate_gradient(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                                   const Eigen::VectorXd& b, int iters, double residual_tol = 1e-10);

/// One trust-region step on the importance-sampled surrogate
/// mean(exp(log pi(a|s) - old_log_prob) * advantage), constrained by
/// mean KL(old || new) <= kl_limit. The natural-gradient direction comes from
/// conjugate gradient on damped Fisher-vector products; the step is scaled
/// to the KL boundary and backtracked until the surrogate improves and the
/// measured KL is within kl_accept_factor * kl_limit. If no candidate is
/// accepted, the input policy is returned with stats.accepted == false.
template <TrustRegionPolicy P>
TrpoResult<P> trpo_update(const P& policy, const TrpoBatch& batch, const Eigen::VectorXd& advantages,
                          const TrpoConfig& config) {
  config.validate();
  const Eigen::Index n = batch.states.cols();
  if (n == 0) throw UsageError("trpo_update: empty batch");
  if (advantages.size() != n || batch.old_log_probs.size() != n || batch.actions.cols() != n) {
    throw ShapeError("trpo_update: batch and advantage lengths disagree");
  }
  const Eigen::MatrixXd features = policy.features(batch.states);
  const double inv_n = 1.0 / static_cast<double>(n);

  auto surrogate = [&](const P& p) {
    const Eigen::VectorXd ratio = (log_prob_batch(p, features, batch.actions) - batch.old_log_probs).array().exp().matrix();
    return inv_n * ratio.dot(advantages);
  };

  TrpoResult<P> result{policy, {}};
  TrpoStats& stats = result.stats;
  stats.surrogate_before = surrogate(policy);
  stats.surrogate_after = stats.surrogate_before;
  if (!std::isfinite(stats.surrogate_before)) {
    throw NumericError("trpo_update: non-finite surrogate; " + stats.dump());
  }

  const Eigen::VectorXd ratio =
      (log_prob_batch(policy, features, batch.actions) - batch.old_log_probs).array().exp().matrix();
  const Eigen::VectorXd grad = log_prob_grad(policy, features, batch.actions, inv_n * ratio.cwiseProduct(advantages));
  stats.grad_norm = grad.norm();
  if (!std::isfinite(stats.grad_norm)) throw NumericError("trpo_update: non-finite gradient; " + stats.dump());
  if (stats.grad_norm == 0.0) return result;

  auto fvp = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return fisher_vector_product(policy, features, v) + config.damping * v;
  };
  const Eigen::VectorXd direction = conjugate_gradient(fvp, grad, config.cg_iters);
  const double shs = direction.dot(fvp(direction));
  if (!(shs > 0.0) || !std::isfinite(shs)) return result;
  const Eigen::VectorXd full_step = std::sqrt(2.0 * config.kl_limit / shs) * direction;
  const Eigen::VectorXd theta_old = policy.flat_params();

  double fraction = 1.0;
  for (int k = 0; k < config.backtrack_iters; ++k, fraction *= config.backtrack_coeff) {
    stats.line_search_steps = k + 1;
    P candidate = policy;
    candidate.set_flat_params(theta_old + fraction * full_step);
    const double kl = mean_kl(policy, candidate, features);
    const double surr = surrogate(candidate);
    if (!std::isfinite(kl) || !std::isfinite(surr)) continue;
    if (kl <= config.kl_accept_factor * config.kl_limit && surr > stats.surrogate_before) {
      stats.accepted = true;
      stats.kl = kl;
      stats.surrogate_after = surr;
      stats.expected_improvement = fraction * grad.dot(full_step);
      result.policy = std::move(candidate);
      return result;
    }
  }
  return result;
}

}  // namespace steach::policy
