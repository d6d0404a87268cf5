#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace steach::train {

inline constexpr const char* kMetricsSchema = "steach-metrics-v1";

/// One row of the per-epoch learning-curve log. Wall-clock time is kept out
/// of this struct (see StageTimings) so the metrics file is reproducible.
struct EpochMetrics {
  int epoch = 0;
  double teacher_mean_return = 0.0;
  double teacher_std_return = 0.0;
  int teacher_episodes = 0;
  double student_mean_return = 0.0;
  double student_std_return = 0.0;
  double mean_teacher_surprise = 0.0;
  double mean_student_surprise = 0.0;
  double eta_T = 0.0;
  double eta_S = 0.0;
  double mean_intrinsic_reward = 0.0;
  double teacher_model_nll = 0.0;
  double student_model_nll = 0.0;
  double trpo_kl = 0.0;
  double trpo_improvement = 0.0;
  int trpo_accepted = 0;
  double value_loss = 0.0;
  double bc_loss = 0.0;
  double demo_mean_abs_action = 0.0;
  double demo_mean_student_surprise = 0.0;

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

/// "# schema=... seed=... mode=... name=..." first line of a metrics file.
std::string metrics_preamble(std::uint64_t seed, const std::string& mode, const std::string& name);
std::string metrics_header();
std::string metrics_row(const EpochMetrics& m);
/// Parses a metrics file body (preamble and header are checked, then rows).
std::vector<EpochMetrics> read_metrics_csv(std::istream& in);

/// Wall-clock milliseconds per stage of one epoch.
struct StageTimings {
  int epoch = 0;
  double stage_ms[7] = {0, 0, 0, 0, 0, 0, 0};
  double total_ms = 0.0;
};

std::string timings_header();
std::string timings_row(const StageTimings& t);

}  // namespace steach::train
