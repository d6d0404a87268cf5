#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

#include "steach/common/rng.hpp"
#include "steach/envs/env.hpp"
#include "steach/nn/adam.hpp"
#include "steach/policy/gaussian_policy.hpp"
#include "steach/policy/rollout.hpp"
#include "steach/policy/trajectory.hpp"

namespace steach::student {

/// Teacher (s, a) pairs handed to the Student, one column per sample.
/// Actions are the executed (clipped) Teacher actions.
struct DemonstrationSet {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  std::vector<int> step_index;  // time step within the source episode
  Eigen::VectorXd teacher_surprise;
  Eigen::VectorXd student_surprise;
  int epoch = 0;

  Eigen::Index size() const { return states.cols(); }
  bool empty() const { return states.cols() == 0; }
};

/// Flattens Teacher trajectories into a demonstration set. Surprise columns
/// are zero-filled; callers annotate them when the models are at hand.
DemonstrationSet make_demonstrations(const std::vector<policy::Trajectory>& trajs, int epoch);

struct BcOptions {
  int epochs = 10;
  int batch_size = 64;
  nn::AdamConfig adam{};

  friend bool operator==(const BcOptions&, const BcOptions&) = default;
};

struct BcReport {
  double loss_before = 0.0;
  double loss_after = 0.0;
  std::vector<double> epoch_losses;
};

/// Negative mean log-likelihood of the demonstrations under the policy.
double bc_loss(const policy::GaussianPolicy& policy, const DemonstrationSet& demos);

/// Maximum-likelihood fit of both the mean network and log_std to the
/// demonstrations by shuffled minibatch Adam. Throws UsageError when empty.
BcReport behavior_clone(policy::GaussianPolicy& policy, const DemonstrationSet& demos, const BcOptions& options,
                        nn::OptimizerState& optimizer, Rng& rng);

struct EvalResult {
  double mean_return = 0.0;
  double std_return = 0.0;
  std::vector<double> per_episode;
};

EvalResult evaluate(const policy::GaussianPolicy& policy, const envs::EnvParams& env, int n_episodes, Rng& rng,
                    policy::ActionMode mode = policy::ActionMode::Deterministic);

/// Mean and population std of a list of returns.
EvalResult summarize_returns(std::vector<double> returns);

/// Column names of the demonstration dump for a `state_dim`-dimensional state.
std::string demo_csv_header(int state_dim);
/// Appends one row per demonstration sample.
void append_demo_csv(std::ostream& out, const DemonstrationSet& demos);

}  // namespace steach::student
