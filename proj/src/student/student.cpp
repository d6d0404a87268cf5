#include "steach/student/student.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "steach/common/error.hpp"
#include "steach/common/format.hpp"

namespace steach::student {

DemonstrationSet make_demonstrations(const std::vector<policy::Trajectory>& trajs, int epoch) {
  DemonstrationSet d;
  d.epoch = epoch;
  const auto n = static_cast<Eigen::Index>(policy::total_steps(trajs));
  if (n == 0) return d;
  const auto& first = trajs.front().steps.front();
  d.states.resize(first.s.size(), n);
  d.actions.resize(first.applied_action.size(), n);
  d.teacher_surprise = Eigen::VectorXd::Zero(n);
  d.student_surprise = Eigen::VectorXd::Zero(n);
  Eigen::Index j = 0;
  for (const auto& traj : trajs) {
    int t = 0;
    for (const auto& step : traj.steps) {
      d.states.col(j) = step.s;
      d.actions.col(j) = step.applied_action;
      d.step_index.push_back(t++);
      ++j;
    }
  }
  return d;
}

double bc_loss(const policy::GaussianPolicy& policy, const DemonstrationSet& demos) {
  if (demos.empty()) throw UsageError("bc_loss: no demonstrations");
  return -policy::log_prob_batch(policy, policy.features(demos.states), demos.actions).mean();
}

BcReport behavior_clone(policy::GaussianPolicy& policy, const DemonstrationSet& demos, const BcOptions& options,
                        nn::OptimizerState& optimizer, Rng& rng) {
  if (demos.empty()) throw UsageError("behavior_clone: no demonstrations");
  if (options.epochs < 0 || options.batch_size <= 0) throw ConfigError("behavior_clone: epochs >= 0, batch_size > 0");
  BcReport report;
  const Eigen::MatrixXd features = policy.features(demos.states);
  report.loss_before = bc_loss(policy, demos);
  report.loss_after = report.loss_before;

  Eigen::VectorXd params = policy.flat_params();
  std::vector<std::size_t> order(static_cast<std::size_t>(demos.size()));
  const auto bs = static_cast<std::size_t>(options.batch_size);
  Eigen::MatrixXd f_batch, a_batch;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      const auto m = static_cast<Eigen::Index>(end - start);
      f_batch.resize(features.rows(), m);
      a_batch.resize(demos.actions.rows(), m);
      for (Eigen::Index j = 0; j < m; ++j) {
        const auto idx = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(j)]);
        f_batch.col(j) = features.col(idx);
        a_batch.col(j) = demos.actions.col(idx);
      }
      // ascend the mean log-likelihood
      const Eigen::VectorXd grad =
          -policy::log_prob_grad(policy, f_batch, a_batch, Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
      nn::adam_step(params, grad, optimizer, options.adam);
      policy.set_flat_params(params);
      params = policy.flat_params();  // keep log_std clamped
    }
    const double loss = bc_loss(policy, demos);
    if (!std::isfinite(loss)) throw NumericError("behavior_clone: non-finite loss at epoch " + std::to_string(epoch));
    report.epoch_losses.push_back(loss);
  }
  if (!report.epoch_losses.empty()) report.loss_after = report.epoch_losses.back();
  return report;
}

EvalResult summarize_returns(std::vector<double> returns) {
  EvalResult r;
  r.per_episode = std::move(returns);
  if (r.per_episode.empty()) return r;
  const double n = static_cast<double>(r.per_episode.size());
  r.mean_return = std::accumulate(r.per_episode.begin(), r.per_episode.end(), 0.0) / n;
  double sq = 0.0;
  for (double x : r.per_episode) sq += (x - r.mean_return) * (x - r.mean_return);
  r.std_return = std::sqrt(sq / n);
  return r;
}

EvalResult evaluate(const policy::GaussianPolicy& policy, const envs::EnvParams& env, int n_episodes, Rng& rng,
                    policy::ActionMode mode) {
  if (n_episodes < 1) throw UsageError("evaluate: n_episodes must be >= 1");
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(n_episodes));
  for (int e = 0; e < n_episodes; ++e) {
    returns.push_back(policy::run_episode(env, policy, rng, mode).extrinsic_return());
  }
  return summarize_returns(std::move(returns));
}

std::string demo_csv_header(int state_dim) {
  std::string h = "epoch,t";
  for (int d = 0; d < state_dim; ++d) h += ",s" + std::to_string(d);
  h += ",action,teacher_surprise,student_surprise";
  return h;
}

void append_demo_csv(std::ostream& out, const DemonstrationSet& demos) {
  for (Eigen::Index j = 0; j < demos.size(); ++j) {
    out << demos.epoch << ',' << demos.step_index[static_cast<std::size_t>(j)];
    for (Eigen::Index d = 0; d < demos.states.rows(); ++d) out << ',' << format_double(demos.states(d, j));
    out << ',' << format_double(demos.actions(0, j)) << ',' << format_double(demos.teacher_surprise[j]) << ','
        << format_double(demos.student_surprise[j]) << '\n';
  }
}

}  // namespace steach::student
