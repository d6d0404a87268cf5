#include "steach/policy/gae.hpp"

#include <cmath>

#include "steach/common/error.hpp"

namespace steach::policy {

AdvantageResult gae_from_values(const std::vector<Trajectory>& trajs, const std::vector<Eigen::VectorXd>& values,
                                const std::vector<double>& bootstrap, double gamma, double lambda,
                                const std::vector<std::vector<double>>& rewards) {
  if (!(gamma >= 0.0 && gamma <= 1.0) || !(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("gae: gamma and lambda must lie in [0, 1]");
  }
  if (rewards.size() != trajs.size() || values.size() != trajs.size() || bootstrap.size() != trajs.size()) {
    throw ShapeError("gae: per-trajectory inputs have different counts");
  }
  const auto n = static_cast<Eigen::Index>(total_steps(trajs));
  AdvantageResult out;
  out.raw_advantages.resize(n);
  out.value_targets.resize(n);
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const auto len = static_cast<Eigen::Index>(trajs[i].length());
    if (static_cast<Eigen::Index>(rewards[i].size()) != len || values[i].size() != len) {
      throw ShapeError("gae: rewards or values not aligned with trajectory steps");
    }
    double next_value = trajs[i].terminal() ? 0.0 : bootstrap[i];
    double running = 0.0;
    for (Eigen::Index t = len - 1; t >= 0; --t) {
      const double delta = rewards[i][static_cast<std::size_t>(t)] + gamma * next_value - values[i][t];
      running = delta + gamma * lambda * running;
      out.raw_advantages[offset + t] = running;
      out.value_targets[offset + t] = running + values[i][t];
      next_value = values[i][t];
    }
    offset += len;
  }
  out.advantages = out.raw_advantages;
  if (n > 0) {
    const double mean = out.advantages.mean();
    out.advantages.array() -= mean;
    const double std = std::sqrt(out.advantages.squaredNorm() / static_cast<double>(n));
    out.advantages /= (std + 1e-8);
  }
  return out;
}

AdvantageResult gae_advantages(const std::vector<Trajectory>& trajs, const ValueFunction& value_fn, double gamma,
                               double lambda, const std::vector<std::vector<double>>& rewards) {
  std::vector<Eigen::VectorXd> values;
  std::vector<double> bootstrap;
  values.reserve(trajs.size());
  for (const auto& traj : trajs) {
    const auto len = static_cast<Eigen::Index>(traj.length());
    Eigen::MatrixXd states(traj.steps.empty() ? 0 : traj.steps.front().s.size(), len + 1);
    for (Eigen::Index t = 0; t < len; ++t) states.col(t) = traj.steps[static_cast<std::size_t>(t)].s;
    if (len > 0) states.col(len) = traj.steps.back().s_next;
    const Eigen::VectorXd v = len > 0 ? value_fn.values(states) : Eigen::VectorXd();
    values.push_back(len > 0 ? Eigen::VectorXd(v.head(len)) : Eigen::VectorXd());
    bootstrap.push_back(len > 0 ? v[len] : 0.0);
  }
  return gae_from_values(trajs, values, bootstrap, gamma, lambda, rewards);
}

}  // namespace steach::policy
