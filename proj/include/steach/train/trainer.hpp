#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "steach/common/rng.hpp"
#include "steach/dynamics/buffer.hpp"
#include "steach/dynamics/model.hpp"
#include "steach/nn/adam.hpp"
#include "steach/policy/gaussian_policy.hpp"
#include "steach/policy/value_function.hpp"
#include "steach/student/student.hpp"
#include "steach/train/config.hpp"
#include "steach/train/metrics.hpp"

namespace steach::train {

/// The seven per-epoch stages, in execution order.
enum class Stage {
  FitTeacherModel,
  TeacherUpdate,
  Demonstrations,
  BehaviorClone,
  StudentRollouts,
  FitStudentModel,
  Evaluate,
};

inline constexpr int kStageCount = 7;
std::string_view to_string(Stage stage);

/// Independent random streams, one per consumer, so that changing one stage's
/// draw count does not shift any other stage.
struct RngStreams {
  Rng teacher_model_fit;
  Rng teacher_rollout;
  Rng value_fit;
  Rng demo;
  Rng bc;
  Rng student_rollout;
  Rng student_model_fit;
  Rng eval;

  static RngStreams from_seed(std::uint64_t seed);
  friend bool operator==(const RngStreams&, const RngStreams&) = default;
};

/// Everything a run needs to continue from the start of `epoch`.
struct TrainingState {
  ExperimentConfig config;
  int epoch = 0;
  policy::GaussianPolicy teacher_policy;
  policy::ValueFunction value_fn;
  policy::GaussianPolicy student_policy;
  dynamics::GaussianDynamicsModel teacher_model;
  dynamics::GaussianDynamicsModel student_model;
  dynamics::TransitionBuffer teacher_buffer;
  dynamics::TransitionBuffer student_buffer;
  nn::OptimizerState teacher_model_opt;
  nn::OptimizerState student_model_opt;
  nn::OptimizerState value_opt;
  nn::OptimizerState bc_opt;
  RngStreams rng;
  /// Per-transition extrinsic rewards of the Student's latest rollout batch.
  std::vector<double> student_rewards;

  /// Fresh networks, empty buffers. Call initialize() to add the warm-start.
  explicit TrainingState(const ExperimentConfig& config);

  /// Fills the Teacher buffer with config.warmup_steps uniform-random-action
  /// transitions from the Teacher environment.
  void initialize();

  friend bool operator==(const TrainingState&, const TrainingState&);
};

/// Products of one epoch besides the metrics row.
struct EpochOutput {
  EpochMetrics metrics;
  StageTimings timings;
  student::DemonstrationSet demos;
};

using StageObserver = std::function<void(Stage)>;

/// Runs one epoch on a copy of `state`. On failure throws StageError naming
/// the stage; `state` itself is never modified.
std::pair<TrainingState, EpochOutput> run_epoch(const TrainingState& state, const StageObserver& observer = {});

struct ExperimentOptions {
  std::filesystem::path out_dir;
  /// Continue from a saved training state instead of starting fresh.
  std::optional<std::filesystem::path> resume_from;
  /// Stop after this epoch index (exclusive); defaults to config.epochs.
  std::optional<int> stop_epoch;
  StageObserver observer;
  /// One progress line per epoch; null silences.
  std::ostream* log = nullptr;
};

/// Runs epochs [start, config.epochs) and writes under out_dir:
///   metrics.csv, timing.csv, demos.csv, config.ini,
///   checkpoints/state_epoch_NNNN.bin (every checkpoint_every epochs),
///   final_state.bin, teacher_policy.bin, student_policy.bin,
///   teacher_model.bin, student_model.bin.
/// On resume, rows already in metrics.csv past the resume point are dropped.
std::vector<EpochMetrics> run_experiment(const ExperimentConfig& config, const ExperimentOptions& options);

/// Path of the state checkpoint written after finishing `epoch` (0-based).
std::filesystem::path state_checkpoint_path(const std::filesystem::path& out_dir, int epoch);

}  // namespace steach::train
