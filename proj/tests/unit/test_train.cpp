#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "steach/common/error.hpp"
#include "steach/train/checkpoint.hpp"
#include "steach/train/comparison.hpp"
#include "steach/train/trainer.hpp"
#include "tiny_config.hpp"

using namespace steach;
namespace fs = std::filesystem;

namespace {

train::TrainingState fresh(const train::ExperimentConfig& c) {
  train::TrainingState s(c);
  s.initialize();
  return s;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("steach_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("mode overrides the surprise weights") {
  auto c = testing::tiny_config();
  c.weights = {0.002, 0.005};
  c.mode = train::Mode::Full;
  CHECK(c.effective_weights() == surprise::SurpriseWeights{0.002, 0.005});
  c.mode = train::Mode::SurpriseMaxBaseline;
  CHECK(c.effective_weights() == surprise::SurpriseWeights{0.002, 0.0});
  c.mode = train::Mode::Plain;
  CHECK(c.effective_weights() == surprise::SurpriseWeights{0.0, 0.0});
  CHECK(train::parse_mode("surprise-max") == train::Mode::SurpriseMaxBaseline);
  CHECK_THROWS_AS(train::parse_mode("bogus"), ConfigError);
}

TEST_CASE("config validation") {
  auto c = testing::tiny_config();
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = testing::tiny_config();
  c.student_env = envs::EnvParams::cartpole_swingup();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = testing::tiny_config();
  c.weights.eta0_S = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("initialization fills only the Teacher buffer") {
  const auto s = fresh(testing::tiny_config());
  CHECK(s.teacher_buffer.size() == 200);
  CHECK(s.student_buffer.empty());
  CHECK(s.teacher_buffer.owner() == dynamics::Owner::Teacher);
  CHECK(s.student_buffer.owner() == dynamics::Owner::Student);
  CHECK(s.teacher_model.owner == dynamics::Owner::Teacher);
  CHECK(s.student_model.owner == dynamics::Owner::Student);
  CHECK(s.epoch == 0);
}

TEST_CASE("stages run in the documented order") {
  std::vector<train::Stage> seen;
  const auto s = fresh(testing::tiny_config());
  train::run_epoch(s, [&](train::Stage st) { seen.push_back(st); });
  const std::vector<train::Stage> expected{train::Stage::FitTeacherModel, train::Stage::TeacherUpdate,
                                           train::Stage::Demonstrations,  train::Stage::BehaviorClone,
                                           train::Stage::StudentRollouts, train::Stage::FitStudentModel,
                                           train::Stage::Evaluate};
  CHECK(seen == expected);
}

TEST_CASE("epoch bookkeeping and buffer ownership") {
  const auto c = testing::tiny_config();
  const auto s0 = fresh(c);
  const auto [s1, out] = train::run_epoch(s0);
  CHECK(s1.epoch == 1);
  CHECK(out.metrics.epoch == 0);
  CHECK(s1.teacher_buffer.size() == 400);
  CHECK(s1.student_buffer.size() == 100);
  CHECK(s1.student_rewards.size() == 100);
  CHECK(out.demos.size() == 100);
  CHECK(out.metrics.eta_T == 0.001);
  CHECK(out.metrics.eta_S == 0.001);
  CHECK(std::isfinite(out.metrics.teacher_model_nll));
}

TEST_CASE("plain mode has zero weights and zero intrinsic reward") {
  auto c = testing::tiny_config();
  c.mode = train::Mode::Plain;
  const auto [s1, out] = train::run_epoch(fresh(c));
  CHECK(out.metrics.eta_T == 0.0);
  CHECK(out.metrics.eta_S == 0.0);
  CHECK(out.metrics.mean_intrinsic_reward == 0.0);
}

TEST_CASE("baseline mode still measures Student surprise") {
  auto c = testing::tiny_config();
  c.mode = train::Mode::SurpriseMaxBaseline;
  auto s = fresh(c);
  for (int e = 0; e < 2; ++e) {
    auto [next, out] = train::run_epoch(s);
    CHECK(out.metrics.eta_S == 0.0);
    CHECK(out.metrics.eta_T > 0.0);
    CHECK(out.metrics.mean_student_surprise > 0.0);
    CHECK(out.metrics.mean_intrinsic_reward == doctest::Approx(out.metrics.eta_T * out.metrics.mean_teacher_surprise));
    s = std::move(next);
  }
}

TEST_CASE("epochs are deterministic") {
  const auto c = testing::tiny_config();
  auto a = fresh(c), b = fresh(c);
  for (int e = 0; e < 2; ++e) {
    auto [na, oa] = train::run_epoch(a);
    auto [nb, ob] = train::run_epoch(b);
    CHECK(oa.metrics == ob.metrics);
    CHECK(train::metrics_row(oa.metrics) == train::metrics_row(ob.metrics));
    CHECK(na == nb);
    a = std::move(na);
    b = std::move(nb);
  }
}

TEST_CASE("the Teacher update ignores the Student environment parameters") {
  for (auto family : {envs::EnvFamily::MountainCar, envs::EnvFamily::CartPoleSwingUp}) {
    auto c = testing::tiny_config(family);
    auto s = fresh(c);
    s = train::run_epoch(s).first;  // the Student model is now trained
    auto perturbed = s;
    perturbed.config.student_env.power *= 3.0;
    perturbed.config.student_env.pole_mass *= 2.0;
    perturbed.config.student_env.x_limit *= 0.5;
    const auto a = train::run_epoch(s).first;
    const auto b = train::run_epoch(perturbed).first;
    CHECK(a.teacher_policy == b.teacher_policy);
    CHECK(a.value_fn == b.value_fn);
    CHECK(a.teacher_model == b.teacher_model);
    CHECK(a.teacher_buffer == b.teacher_buffer);
  }
}

TEST_CASE("a failing stage is labeled and leaves the input state alone") {
  auto s = fresh(testing::tiny_config());
  s.teacher_policy.mean_net.biases.back().setConstant(NAN);
  const auto copy = s;
  try {
    train::run_epoch(s);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "teacher_update");
  }
  CHECK(s.epoch == copy.epoch);
  CHECK(s.teacher_buffer == copy.teacher_buffer);
  CHECK(s.teacher_model == copy.teacher_model);
}

TEST_CASE("state checkpoints round-trip and resume bit-exactly") {
  const fs::path dir = scratch("state");
  fs::create_directories(dir);
  const auto c = testing::tiny_config(envs::EnvFamily::CartPoleSwingUp);
  auto s = train::run_epoch(fresh(c)).first;
  train::save_state(dir / "s.bin", s);
  const auto loaded = train::load_state(dir / "s.bin");
  CHECK(loaded == s);
  const auto [a, oa] = train::run_epoch(s);
  const auto [b, ob] = train::run_epoch(loaded);
  CHECK(train::metrics_row(oa.metrics) == train::metrics_row(ob.metrics));
  CHECK(a == b);

  train::save_policy(dir / "p.bin", s.student_policy);
  CHECK(train::load_policy(dir / "p.bin") == s.student_policy);
  CHECK_THROWS_AS(train::load_state(dir / "p.bin"), IoError);
  CHECK_THROWS_AS(train::load_state(dir / "missing.bin"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("run_experiment writes reproducible logs and resumes exactly") {
  auto c = testing::tiny_config();
  c.epochs = 4;
  c.checkpoint_every = 1;
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  train::ExperimentOptions oa;
  oa.out_dir = a;
  const auto metrics = train::run_experiment(c, oa);
  CHECK(metrics.size() == 4);
  for (int e = 0; e < 4; ++e) CHECK(metrics[static_cast<std::size_t>(e)].epoch == e);
  for (const char* f : {"metrics.csv", "timing.csv", "demos.csv", "config.ini", "final_state.bin",
                        "teacher_policy.bin", "student_policy.bin", "teacher_model.bin", "student_model.bin"}) {
    CHECK(fs::exists(a / f));
  }
  const std::string text = slurp(a / "metrics.csv");
  CHECK(text.rfind("# schema=steach-metrics-v1 seed=0 mode=full name=tiny\n" + train::metrics_header() + "\n", 0) == 0);
  std::istringstream in(text);
  CHECK(train::read_metrics_csv(in) == metrics);

  train::ExperimentOptions ob;
  ob.out_dir = b;
  train::run_experiment(c, ob);
  CHECK(slurp(b / "metrics.csv") == text);
  CHECK(slurp(b / "demos.csv") == slurp(a / "demos.csv"));

  // Resume from the state after epoch 1; epochs 2 and 3 must match exactly.
  train::ExperimentOptions oc;
  oc.out_dir = b;
  oc.resume_from = train::state_checkpoint_path(a, 1);
  train::run_experiment(c, oc);
  CHECK(slurp(b / "metrics.csv") == text);
  CHECK(train::load_state(b / "final_state.bin") == train::load_state(a / "final_state.bin"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run_experiment reports unusable output paths") {
  const fs::path f = scratch("not_a_dir");
  { std::ofstream(f) << "x"; }
  train::ExperimentOptions o;
  o.out_dir = f / "sub";
  CHECK_THROWS_AS(train::run_experiment(testing::tiny_config(), o), IoError);
  fs::remove_all(f);
}

TEST_CASE("comparison tables") {
  auto c = testing::tiny_config();
  c.epochs = 2;
  const fs::path dir = scratch("cmp");

  SUBCASE("single run equals its final metrics") {
    train::ComparisonOptions o;
    o.out_dir = dir;
    o.tail_epochs = 1;
    const auto t = train::run_comparison(c, {train::Mode::Full}, {3}, o);
    REQUIRE(t.runs.size() == 1);
    std::ifstream in(dir / "full" / "seed_3" / "metrics.csv");
    const auto m = train::read_metrics_csv(in);
    CHECK(t.runs[0].ok);
    CHECK(t.runs[0].student_final == m.back().student_mean_return);
    CHECK(t.runs[0].teacher_final == m.back().teacher_mean_return);
    CHECK(t.runs[0].student_tail == m.back().student_mean_return);
  }
  SUBCASE("grid with a failed seed and parallel workers") {
    fs::create_directories(dir / "surprise_max_baseline");
    { std::ofstream(dir / "surprise_max_baseline" / "seed_1") << "blocks the run directory"; }
    train::ComparisonOptions o;
    o.out_dir = dir;
    o.workers = 2;
    const auto t = train::run_comparison(c, {train::Mode::Full, train::Mode::SurpriseMaxBaseline}, {0, 1}, o);
    REQUIRE(t.runs.size() == 4);
    CHECK(t.runs[0].mode == train::Mode::Full);
    CHECK(t.runs[1].seed == 1);
    CHECK(t.runs[2].ok);
    CHECK_FALSE(t.runs[3].ok);
    std::ostringstream csv;
    train::write_comparison_csv(csv, t);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == train::comparison_header());
    int runs = 0, aggregates = 0, missing = 0;
    while (std::getline(lines, line)) {
      if (line.rfind("run,", 0) == 0) ++runs;
      if (line.rfind("aggregate,", 0) == 0) ++aggregates;
      if (line.find(",missing,") != std::string::npos) ++missing;
    }
    CHECK(runs == 4);
    CHECK(aggregates == 2);
    CHECK(missing == 1);
    const auto mean = train::mean_over_seeds(t, train::Mode::SurpriseMaxBaseline, c.weights.eta0_S,
                                             &train::RunSummary::student_tail);
    REQUIRE(mean.has_value());
    CHECK(*mean == t.runs[2].student_tail);
  }
  fs::remove_all(dir);
}

TEST_CASE("sweep pairs one baseline with every Student weight") {
  auto c = testing::tiny_config();
  c.epochs = 1;
  const fs::path dir = scratch("sweep");
  train::ComparisonOptions o;
  o.out_dir = dir;
  const auto t = train::run_sweep(c, {0.001, 0.005}, {0}, o);
  REQUIRE(t.runs.size() == 4);
  CHECK(t.runs[0].mode == train::Mode::Full);
  CHECK(t.runs[0].eta0_S == 0.001);
  CHECK(t.runs[1].mode == train::Mode::SurpriseMaxBaseline);
  CHECK(t.runs[1].eta0_S == 0.001);
  CHECK(t.runs[3].eta0_S == 0.005);
  CHECK(t.runs[1].student_tail == t.runs[3].student_tail);
  CHECK(fs::exists(dir / "eta0_S_0.005" / "full" / "seed_0" / "metrics.csv"));
  fs::remove_all(dir);
}
