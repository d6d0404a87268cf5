#include "steach/surprise/surprise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "steach/common/error.hpp"

namespace steach::surprise {

void SurpriseWeights::validate() const {
  if (!std::isfinite(eta0_T) || eta0_T < 0.0) throw ConfigError("eta0_T must be finite and >= 0");
  if (!std::isfinite(eta0_S) || eta0_S < 0.0) throw ConfigError("eta0_S must be finite and >= 0");
}

Eigen::VectorXd teacher_surprise_batch(const dynamics::GaussianDynamicsModel& model_T,
                                       const Eigen::MatrixXd& s, const Eigen::MatrixXd& a,
                                       const Eigen::MatrixXd& s_next) {
  if (s_next.rows() != s.rows() || s_next.cols() != s.cols()) {
    throw ShapeError("teacher_surprise: next-state batch shape mismatch");
  }
  if (!s.allFinite() || !a.allFinite() || !s_next.allFinite()) {
    throw NumericError("teacher_surprise: non-finite transition");
  }
  const auto p = dynamics::predict_batch(model_T, s, a);
  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  const Eigen::ArrayXXd terms = (s_next - p.mean).array().square() * (-p.log_variance.array()).exp() +
                                p.log_variance.array() + log_two_pi;
  Eigen::VectorXd out = 0.5 * terms.colwise().sum().transpose().matrix();
  if (!out.allFinite()) throw NumericError("teacher_surprise: non-finite density");
  return out;
}

Eigen::VectorXd student_surprise_batch(const dynamics::GaussianDynamicsModel& model_T,
                                       const dynamics::GaussianDynamicsModel& model_S,
                                       const Eigen::MatrixXd& s, const Eigen::MatrixXd& a) {
  if (model_T.state_dim != model_S.state_dim || model_T.action_dim != model_S.action_dim) {
    throw ShapeError("student_surprise: Teacher and Student models have different dimensions");
  }
  const auto p = dynamics::predict_batch(model_T, s, a);
  const auto q = dynamics::predict_batch(model_S, s, a);
  const Eigen::ArrayXXd lv_p = p.log_variance.array();
  const Eigen::ArrayXXd lv_q = q.log_variance.array();
  const Eigen::ArrayXXd dm = (p.mean - q.mean).array();
  // log(sigma_q / sigma_p) + (var_p + dm^2) / (2 var_q) - 1/2
  const Eigen::ArrayXXd terms =
      0.5 * (lv_q - lv_p) + 0.5 * ((lv_p - lv_q).exp() + dm.square() * (-lv_q).exp()) - 0.5;
  Eigen::VectorXd out = terms.colwise().sum().transpose().matrix();
  if (!out.allFinite()) throw NumericError("student_surprise: non-finite divergence");
  return out.cwiseMax(0.0);
}

double teacher_surprise(const dynamics::GaussianDynamicsModel& model_T, const Eigen::VectorXd& s,
                        const Eigen::VectorXd& a, const Eigen::VectorXd& s_next) {
  return teacher_surprise_batch(model_T, Eigen::MatrixXd(s), Eigen::MatrixXd(a), Eigen::MatrixXd(s_next))[0];
}

double student_surprise(const dynamics::GaussianDynamicsModel& model_T,
                        const dynamics::GaussianDynamicsModel& model_S, const Eigen::VectorXd& s,
                        const Eigen::VectorXd& a) {
  return student_surprise_batch(model_T, model_S, Eigen::MatrixXd(s), Eigen::MatrixXd(a))[0];
}

double eta(double eta0, std::span<const double> extrinsic_rewards) {
  if (extrinsic_rewards.empty()) throw UsageError("eta: empty reward list");
  const double mean = std::accumulate(extrinsic_rewards.begin(), extrinsic_rewards.end(), 0.0) /
                      static_cast<double>(extrinsic_rewards.size());
  return eta0 / std::max(1.0, mean);
}

namespace {

ShapedTrajectory shape_with(const policy::Trajectory& traj, const dynamics::GaussianDynamicsModel& model_T,
                            const dynamics::GaussianDynamicsModel& model_S, double eta_T, double eta_S) {
  ShapedTrajectory out;
  const auto n = static_cast<Eigen::Index>(traj.length());
  if (n == 0) return out;
  const Eigen::Index sd = traj.steps.front().s.size();
  const Eigen::Index ad = traj.steps.front().applied_action.size();
  Eigen::MatrixXd s(sd, n), a(ad, n), s_next(sd, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& t = traj.steps[static_cast<std::size_t>(j)];
    s.col(j) = t.s;
    a.col(j) = t.applied_action;
    s_next.col(j) = t.s_next;
  }
  const Eigen::VectorXd ts = teacher_surprise_batch(model_T, s, a, s_next);
  const Eigen::VectorXd ss = student_surprise_batch(model_T, model_S, s, a);
  out.reserve(traj.length());
  for (Eigen::Index j = 0; j < n; ++j) {
    ShapedTransition st;
    st.base = traj.steps[static_cast<std::size_t>(j)];
    st.teacher_surprise = ts[j];
    st.student_surprise = ss[j];
    st.eta_T_used = eta_T;
    st.eta_S_used = eta_S;
    st.r_int = eta_T * ts[j] - eta_S * ss[j];
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace

ShapedTrajectory shape_trajectory(const policy::Trajectory& traj,
                                  const dynamics::GaussianDynamicsModel& model_T,
                                  const dynamics::GaussianDynamicsModel& model_S,
                                  const SurpriseWeights& weights,
                                  std::span<const double> teacher_rollout_rewards,
                                  std::span<const double> student_rollout_rewards) {
  weights.validate();
  return shape_with(traj, model_T, model_S, eta(weights.eta0_T, teacher_rollout_rewards),
                    eta(weights.eta0_S, student_rollout_rewards));
}

std::vector<ShapedTrajectory> shape_rollout(const std::vector<policy::Trajectory>& trajs,
                                            const dynamics::GaussianDynamicsModel& model_T,
                                            const dynamics::GaussianDynamicsModel& model_S,
                                            const SurpriseWeights& weights,
                                            std::span<const double> teacher_rollout_rewards,
                                            std::span<const double> student_rollout_rewards) {
  weights.validate();
  const double eta_T = eta(weights.eta0_T, teacher_rollout_rewards);
  const double eta_S = eta(weights.eta0_S, student_rollout_rewards);
  std::vector<ShapedTrajectory> out;
  out.reserve(trajs.size());
  for (const auto& t : trajs) out.push_back(shape_with(t, model_T, model_S, eta_T, eta_S));
  return out;
}

}  // namespace steach::surprise
