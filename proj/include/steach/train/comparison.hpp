#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "steach/train/config.hpp"
#include "steach/train/metrics.hpp"

namespace steach::train {

/// Final statistics of one (mode, seed) run. `final` values are the last
/// epoch's; `tail` values average the last `tail_epochs` epochs.
struct RunSummary {
  Mode mode = Mode::Full;
  std::uint64_t seed = 0;
  double eta0_S = 0.0;
  bool ok = false;
  std::string error;
  double teacher_final = 0.0;
  double student_final = 0.0;
  double teacher_tail = 0.0;
  double student_tail = 0.0;
  double demo_force_tail = 0.0;
  int accepted_updates = 0;
};

RunSummary summarize_run(Mode mode, std::uint64_t seed, double eta0_S, const std::vector<EpochMetrics>& metrics,
                         int tail_epochs = 10);

struct ComparisonOptions {
  std::filesystem::path out_dir;
  int workers = 1;
  int tail_epochs = 10;
  std::ostream* log = nullptr;
};

struct ComparisonTable {
  std::vector<RunSummary> runs;  // mode-major, then seed, in request order
};

/// Runs every (mode, seed) pair into out_dir/<mode>/seed_<n>. Failed runs are
/// kept with ok == false and excluded from aggregates.
ComparisonTable run_comparison(const ExperimentConfig& base, const std::vector<Mode>& modes,
                               const std::vector<std::uint64_t>& seeds, const ComparisonOptions& options);

/// CSV with one "run" row per summary plus one "aggregate" row per
/// (eta0_S, mode) carrying across-seed mean and std of the ok runs.
std::string comparison_header();
void write_comparison_csv(std::ostream& out, const ComparisonTable& table);

/// Comparison of {full, surprise_max_baseline} repeated for each eta0_S, into
/// out_dir/eta0_S_<value>/.
ComparisonTable run_sweep(const ExperimentConfig& base, const std::vector<double>& eta0_S_values,
                          const std::vector<std::uint64_t>& seeds, const ComparisonOptions& options);

/// Mean of a field over ok runs matching mode and eta0_S; nullopt if none.
std::optional<double> mean_over_seeds(const ComparisonTable& table, Mode mode, double eta0_S,
                                      double RunSummary::*field);

}  // namespace steach::train
