#include "steach/train/metrics.hpp"

#include <istream>
#include <sstream>

#include "steach/common/error.hpp"
#include "steach/common/format.hpp"

namespace steach::train {

namespace {

constexpr const char* kColumns[] = {
    "epoch",
    "teacher_mean_return",
    "teacher_std_return",
    "teacher_episodes",
    "student_mean_return",
    "student_std_return",
    "mean_teacher_surprise",
    "mean_student_surprise",
    "eta_T",
    "eta_S",
    "mean_intrinsic_reward",
    "teacher_model_nll",
    "student_model_nll",
    "trpo_kl",
    "trpo_improvement",
    "trpo_accepted",
    "value_loss",
    "bc_loss",
    "demo_mean_abs_action",
    "demo_mean_student_surprise",
};

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::string metrics_preamble(std::uint64_t seed, const std::string& mode, const std::string& name) {
  return std::string("# schema=") + kMetricsSchema + " seed=" + std::to_string(seed) + " mode=" + mode +
         " name=" + name;
}

std::string metrics_header() {
  std::string out;
  for (const char* c : kColumns) out += (out.empty() ? "" : ",") + std::string(c);
  return out;
}

std::string metrics_row(const EpochMetrics& m) {
  std::ostringstream o;
  auto d = [&](double v) { o << ',' << format_double(v); };
  o << m.epoch;
  d(m.teacher_mean_return);
  d(m.teacher_std_return);
  o << ',' << m.teacher_episodes;
  d(m.student_mean_return);
  d(m.student_std_return);
  d(m.mean_teacher_surprise);
  d(m.mean_student_surprise);
  d(m.eta_T);
  d(m.eta_S);
  d(m.mean_intrinsic_reward);
  d(m.teacher_model_nll);
  d(m.student_model_nll);
  d(m.trpo_kl);
  d(m.trpo_improvement);
  o << ',' << m.trpo_accepted;
  d(m.value_loss);
  d(m.bc_loss);
  d(m.demo_mean_abs_action);
  d(m.demo_mean_student_surprise);
  return o.str();
}

std::vector<EpochMetrics> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(std::string("# schema=") + kMetricsSchema, 0) != 0) {
    throw IoError("metrics file: missing or unknown schema line");
  }
  if (!std::getline(in, line) || line != metrics_header()) throw IoError("metrics file: header mismatch");
  std::vector<EpochMetrics> rows;
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != std::size(kColumns)) {
      throw IoError("metrics file line " + std::to_string(line_no) + ": expected " +
                    std::to_string(std::size(kColumns)) + " columns");
    }
    std::size_t i = 0;
    auto d = [&] { return parse_double(cells[i++], "metrics column"); };
    auto n = [&] { return static_cast<int>(parse_integer(cells[i++], "metrics column")); };
    EpochMetrics m;
    m.epoch = n();
    m.teacher_mean_return = d();
    m.teacher_std_return = d();
    m.teacher_episodes = n();
    m.student_mean_return = d();
    m.student_std_return = d();
    m.mean_teacher_surprise = d();
    m.mean_student_surprise = d();
    m.eta_T = d();
    m.eta_S = d();
    m.mean_intrinsic_reward = d();
    m.teacher_model_nll = d();
    m.student_model_nll = d();
    m.trpo_kl = d();
    m.trpo_improvement = d();
    m.trpo_accepted = n();
    m.value_loss = d();
    m.bc_loss = d();
    m.demo_mean_abs_action = d();
    m.demo_mean_student_surprise = d();
    rows.push_back(m);
  }
  return rows;
}

std::string timings_header() {
  return "epoch,fit_teacher_model_ms,teacher_update_ms,demonstrations_ms,behavior_clone_ms,"
         "student_rollouts_ms,fit_student_model_ms,evaluate_ms,total_ms";
}

std::string timings_row(const StageTimings& t) {
  std::ostringstream o;
  o << t.epoch;
  for (double ms : t.stage_ms) o << ',' << format_double(ms);
  o << ',' << format_double(t.total_ms);
  return o.str();
}

}  // namespace steach::train
