#include "steach/policy/trajectory.hpp"

namespace steach::policy {

double Trajectory::extrinsic_return() const {
  double total = 0.0;
  for (const auto& t : steps) total += t.r_ext;
  return total;
}

std::vector<double> extrinsic_rewards(const std::vector<Trajectory>& trajs) {
  std::vector<double> out;
  out.reserve(total_steps(trajs));
  for (const auto& traj : trajs)
    for (const auto& t : traj.steps) out.push_back(t.r_ext);
  return out;
}

std::size_t total_steps(const std::vector<Trajectory>& trajs) {
  std::size_t n = 0;
  for (const auto& t : trajs) n += t.length();
  return n;
}

}  // namespace steach::policy
