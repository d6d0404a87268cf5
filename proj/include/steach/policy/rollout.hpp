#pragma once

#include <vector>

#include "steach/common/rng.hpp"
#include "steach/envs/env.hpp"
#include "steach/policy/gaussian_policy.hpp"
#include "steach/policy/trajectory.hpp"

namespace steach::policy {

enum class ActionMode { Stochastic, Deterministic };

/// Runs episodes until exactly `n_steps` transitions are collected; the last
/// episode may be partial (complete == false). Episode starts are drawn from
/// `rng`, so the batch is a pure function of the generator state.
std::vector<Trajectory> collect_rollouts(const envs::EnvParams& env, const GaussianPolicy& policy, int n_steps,
                                         Rng& rng, ActionMode mode = ActionMode::Stochastic);

/// Plays one complete episode.
Trajectory run_episode(const envs::EnvParams& env, const GaussianPolicy& policy, Rng& rng, ActionMode mode);

}  // namespace steach::policy
