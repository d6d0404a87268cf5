#include "steach/train/comparison.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "steach/common/error.hpp"
#include "steach/common/format.hpp"
#include "steach/train/trainer.hpp"

namespace steach::train {

namespace fs = std::filesystem;

RunSummary summarize_run(Mode mode, std::uint64_t seed, double eta0_S, const std::vector<EpochMetrics>& metrics,
                         int tail_epochs) {
  RunSummary s;
  s.mode = mode;
  s.seed = seed;
  s.eta0_S = eta0_S;
  if (metrics.empty()) {
    s.error = "no epochs recorded";
    return s;
  }
  s.ok = true;
  s.teacher_final = metrics.back().teacher_mean_return;
  s.student_final = metrics.back().student_mean_return;
  const auto n = std::min<std::size_t>(metrics.size(), static_cast<std::size_t>(std::max(1, tail_epochs)));
  for (std::size_t i = metrics.size() - n; i < metrics.size(); ++i) {
    s.teacher_tail += metrics[i].teacher_mean_return / static_cast<double>(n);
    s.student_tail += metrics[i].student_mean_return / static_cast<double>(n);
    s.demo_force_tail += metrics[i].demo_mean_abs_action / static_cast<double>(n);
  }
  for (const auto& m : metrics) s.accepted_updates += m.trpo_accepted;
  return s;
}

namespace {

struct Job {
  ExperimentConfig config;
  fs::path dir;
  double eta0_S = 0.0;
};

std::vector<RunSummary> run_jobs(const std::vector<Job>& jobs, const ComparisonOptions& options) {
  std::vector<RunSummary> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      std::ostringstream progress;
      try {
        ExperimentOptions eo;
        eo.out_dir = job.dir;
        const auto metrics = run_experiment(job.config, eo);
        results[i] = summarize_run(job.config.mode, job.config.seed, job.eta0_S, metrics, options.tail_epochs);
        progress << "done " << job.dir.string() << " student_tail " << format_double(results[i].student_tail)
                 << " teacher_tail " << format_double(results[i].teacher_tail);
      } catch (const std::exception& e) {
        results[i] = RunSummary{};
        results[i].mode = job.config.mode;
        results[i].seed = job.config.seed;
        results[i].eta0_S = job.eta0_S;
        results[i].error = e.what();
        progress << "FAILED " << job.dir.string() << ": " << e.what();
      }
      if (options.log) {
        std::lock_guard lock(log_mutex);
        *options.log << progress.str() << '\n' << std::flush;
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(options.workers, static_cast<int>(jobs.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

std::vector<Job> comparison_jobs(const ExperimentConfig& base, const std::vector<Mode>& modes,
                                 const std::vector<std::uint64_t>& seeds, const fs::path& dir) {
  if (modes.empty() || seeds.empty()) throw UsageError("run_comparison: need at least one mode and one seed");
  std::vector<Job> jobs;
  for (Mode mode : modes) {
    for (std::uint64_t seed : seeds) {
      Job j{base, dir / std::string(to_string(mode)) / ("seed_" + std::to_string(seed)), base.weights.eta0_S};
      j.config.mode = mode;
      j.config.seed = seed;
      j.config.validate();
      jobs.push_back(std::move(j));
    }
  }
  return jobs;
}

std::string cell(bool ok, double v) { return ok ? format_double(v) : ""; }

}  // namespace

ComparisonTable run_comparison(const ExperimentConfig& base, const std::vector<Mode>& modes,
                               const std::vector<std::uint64_t>& seeds, const ComparisonOptions& options) {
  return {run_jobs(comparison_jobs(base, modes, seeds, options.out_dir), options)};
}

ComparisonTable run_sweep(const ExperimentConfig& base, const std::vector<double>& eta0_S_values,
                          const std::vector<std::uint64_t>& seeds, const ComparisonOptions& options) {
  if (eta0_S_values.empty()) throw UsageError("run_sweep: need at least one eta0_S value");
  // The baseline ignores eta0_S, so it runs once and is paired with every value.
  std::vector<Job> jobs = comparison_jobs(base, {Mode::SurpriseMaxBaseline}, seeds, options.out_dir);
  for (double v : eta0_S_values) {
    ExperimentConfig c = base;
    c.weights.eta0_S = v;
    for (auto& j : comparison_jobs(c, {Mode::Full}, seeds, options.out_dir / ("eta0_S_" + format_double(v)))) {
      jobs.push_back(std::move(j));
    }
  }
  const auto results = run_jobs(jobs, options);
  ComparisonTable table;
  const std::size_t nb = seeds.size();
  for (std::size_t k = 0; k < eta0_S_values.size(); ++k) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      table.runs.push_back(results[nb + k * nb + i]);
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      RunSummary b = results[i];
      b.eta0_S = eta0_S_values[k];
      table.runs.push_back(b);
    }
  }
  return table;
}

std::optional<double> mean_over_seeds(const ComparisonTable& table, Mode mode, double eta0_S,
                                      double RunSummary::*field) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : table.runs) {
    if (r.ok && r.mode == mode && r.eta0_S == eta0_S) {
      sum += r.*field;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::string comparison_header() {
  return "kind,mode,seed,eta0_S,status,n,teacher_final,student_final,teacher_tail,student_tail,demo_force_tail,"
         "teacher_tail_std,student_tail_std";
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table) {
  out << comparison_header() << '\n';
  for (const auto& r : table.runs) {
    out << "run," << to_string(r.mode) << ',' << r.seed << ',' << format_double(r.eta0_S) << ','
        << (r.ok ? "ok" : "missing") << ',' << (r.ok ? 1 : 0) << ',' << cell(r.ok, r.teacher_final) << ','
        << cell(r.ok, r.student_final) << ',' << cell(r.ok, r.teacher_tail) << ',' << cell(r.ok, r.student_tail)
        << ',' << cell(r.ok, r.demo_force_tail) << ",0,0\n";
  }
  // Aggregates per (eta0_S, mode) in first-appearance order.
  std::vector<std::pair<double, Mode>> groups;
  for (const auto& r : table.runs) {
    const std::pair<double, Mode> key{r.eta0_S, r.mode};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }
  for (const auto& [eta, mode] : groups) {
    std::vector<const RunSummary*> ok;
    for (const auto& r : table.runs)
      if (r.ok && r.mode == mode && r.eta0_S == eta) ok.push_back(&r);
    const bool any = !ok.empty();
    auto mean = [&](double RunSummary::*f) {
      double s = 0.0;
      for (const auto* r : ok) s += r->*f;
      return any ? s / static_cast<double>(ok.size()) : 0.0;
    };
    auto stdev = [&](double RunSummary::*f) {
      const double mu = mean(f);
      double s = 0.0;
      for (const auto* r : ok) s += (r->*f - mu) * (r->*f - mu);
      return any ? std::sqrt(s / static_cast<double>(ok.size())) : 0.0;
    };
    out << "aggregate," << to_string(mode) << ",," << format_double(eta) << ',' << (any ? "ok" : "missing") << ','
        << ok.size() << ',' << cell(any, mean(&RunSummary::teacher_final)) << ','
        << cell(any, mean(&RunSummary::student_final)) << ',' << cell(any, mean(&RunSummary::teacher_tail)) << ','
        << cell(any, mean(&RunSummary::student_tail)) << ',' << cell(any, mean(&RunSummary::demo_force_tail)) << ','
        << cell(any, stdev(&RunSummary::teacher_tail)) << ',' << cell(any, stdev(&RunSummary::student_tail))
        << '\n';
  }
}

}  // namespace steach::train
