#include "steach/policy/rollout.hpp"

#include <string>

#include "steach/common/error.hpp"

namespace steach::policy {

namespace {

// Advances one step; returns true when the episode ended.
bool advance(const envs::EnvParams& env, const GaussianPolicy& policy, envs::EnvState& state, Rng& rng,
             ActionMode mode, Trajectory& traj) {
  Transition t;
  t.s = state.x;
  if (mode == ActionMode::Stochastic) {
    auto [a, lp] = act(policy, state.x, rng);
    t.action = std::move(a);
    t.log_prob = lp;
  } else {
    t.action = mean_action(policy, state.x);
    t.log_prob = log_prob(policy, state.x, t.action);
  }
  t.applied_action = envs::clip_action(env, t.action);
  auto result = envs::step(env, state, t.action);
  t.r_ext = result.reward_ext;
  t.s_next = result.next_state.x;
  t.done = result.done;
  traj.steps.push_back(std::move(t));
  state = std::move(result.next_state);
  if (result.done) {
    traj.complete = true;
    traj.done_reason = result.done_reason;
  }
  return result.done;
}

}  // namespace

std::vector<Trajectory> collect_rollouts(const envs::EnvParams& env, const GaussianPolicy& policy, int n_steps,
                                         Rng& rng, ActionMode mode) {
  if (n_steps < 1) throw UsageError("collect_rollouts: n_steps must be >= 1");
  std::vector<Trajectory> out;
  int collected = 0;
  while (collected < n_steps) {
    Trajectory traj;
    envs::EnvState state = envs::reset(env, rng);
    try {
      while (collected < n_steps) {
        ++collected;
        if (advance(env, policy, state, rng, mode, traj)) break;
      }
    } catch (const Error& e) {
      throw NumericError("collect_rollouts: episode " + std::to_string(out.size()) + ": " + e.what());
    }
    out.push_back(std::move(traj));
  }
  return out;
}

Trajectory run_episode(const envs::EnvParams& env, const GaussianPolicy& policy, Rng& rng, ActionMode mode) {
  Trajectory traj;
  envs::EnvState state = envs::reset(env, rng);
  while (!advance(env, policy, state, rng, mode, traj)) {
  }
  return traj;
}

}  // namespace steach::policy
