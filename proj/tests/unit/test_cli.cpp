#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "steach/cli/config_file.hpp"
#include "steach/cli/presets.hpp"
#include "steach/common/error.hpp"
#include "steach/common/rng.hpp"
#include "steach/train/checkpoint.hpp"
#include "steach/train/metrics.hpp"
#include "steach/train/trainer.hpp"
#include "tiny_config.hpp"

using namespace steach;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    cli::parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int run(const std::string& args) {
  const std::string cmd = std::string(STEACH_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string capture(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "steach_cli_capture.txt";
  const std::string cmd = std::string(STEACH_BINARY) + " " + args + " > " + out.string() + " 2>/dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(f, l);) out.push_back(l);
  return out;
}

fs::path write_tiny(const fs::path& dir, train::Mode mode) {
  auto c = testing::tiny_config();
  c.mode = mode;
  c.epochs = 2;
  fs::create_directories(dir);
  const fs::path p = dir / "tiny.ini";
  std::ofstream(p) << cli::serialize_config(c);
  return p;
}

}  // namespace

TEST_CASE("minimal preset config") {
  const auto c = cli::parse_config("[experiment]\npreset = mountaincar-hetero-power\n");
  CHECK(c.teacher_env.power == 0.001);
  CHECK(c.student_env.power == 0.0067);
  CHECK(c.name == "mountaincar-hetero-power");
  CHECK(c == cli::preset("mountaincar-hetero-power"));
}

TEST_CASE("keys after the preset override it") {
  const auto c = cli::parse_config(
      "# comment\n[experiment]\npreset = cartpole-hetero-xlimit\nepochs = 7 ; trailing\n"
      "[student_env]\nx_limit = 1.5\n[networks]\npolicy_hidden = 4, 5\n");
  CHECK(c.epochs == 7);
  CHECK(c.student_env.x_limit == 1.5);
  CHECK(c.teacher_env.x_limit == 3.6);
  CHECK(c.networks.policy_hidden == std::vector<int>{4, 5});
}

TEST_CASE("config errors name the line") {
  CHECK(error_of("[surprise]\neta0_S = -1\n").find("line 2") != std::string::npos);
  CHECK(error_of("[surprise]\neta0_S = -1\n").find("eta0_S") != std::string::npos);
  CHECK(error_of("[experiment]\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(error_of("[nowhere]\nx = 1\n").find("line 1") != std::string::npos);
  CHECK(error_of("[experiment]\nepochs = ten\n").find("line 2") != std::string::npos);
  CHECK(error_of("[experiment]\nepochs 10\n").find("line 2") != std::string::npos);
  CHECK(error_of("[experiment]\npreset = nope\n").find("mountaincar-homogeneous") != std::string::npos);
  CHECK(error_of("[teacher_env]\nfamily = cartpole_swingup\n") != "");
  CHECK_THROWS_AS(cli::load_config_file("/nonexistent/steach.ini"), IoError);
}

TEST_CASE("serialize and parse are inverse on random configs") {
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    auto c = testing::tiny_config(rng.uniform(0.0, 1.0) < 0.5 ? envs::EnvFamily::MountainCar
                                                            : envs::EnvFamily::CartPoleSwingUp);
    c.name = "random_" + std::to_string(i);
    c.mode = static_cast<train::Mode>(i % 3);
    c.seed = static_cast<std::uint64_t>(rng.uniform(0.0, 1e9));
    c.epochs = 1 + i;
    c.weights = {rng.uniform(0.0, 0.01), rng.uniform(0.0, 0.01)};
    c.teacher_env.power = rng.uniform(1e-4, 1e-2);
    c.student_env.pole_mass = rng.uniform(0.05, 0.5);
    c.student_env.x_limit = rng.uniform(1.0, 5.0) / 3.0;
    c.networks.dynamics_hidden = {1 + i % 7, 3};
    c.networks.init_log_std = rng.uniform(-2.0, 0.5);
    c.dynamics.adam.step_size = rng.uniform(1e-5, 1e-2);
    c.teacher.trpo.kl_limit = rng.uniform(1e-3, 0.1);
    c.teacher.lambda = rng.uniform(0.5, 1.0);
    c.bc.batch_size = 1 + i;
    const auto text = cli::serialize_config(c);
    CHECK(text.find("preset") == std::string::npos);
    CHECK(cli::parse_config(text) == c);
  }
}

TEST_CASE("every preset and shipped preset file parses") {
  const auto names = cli::preset_names();
  CHECK(names.size() >= 7);
  for (const auto& n : names) {
    CAPTURE(n);
    const auto c = cli::preset(n);
    CHECK_NOTHROW(c.validate());
    CHECK(cli::parse_config(cli::serialize_config(c)) == c);
    const fs::path file = fs::path(STEACH_SOURCE_DIR) / "presets" / (n + ".ini");
    REQUIRE(fs::exists(file));
    CHECK(cli::load_config_file(file.string()) == c);
  }
  CHECK_THROWS_AS(cli::preset("nope"), ConfigError);
}

TEST_CASE("known keys cover the serialized text") {
  const auto keys = cli::known_keys();
  std::istringstream in(cli::serialize_config(train::ExperimentConfig{}));
  std::string section, line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      section = line.substr(1, line.find(']') - 1);
      continue;
    }
    const auto key = section + "." + line.substr(0, line.find(' '));
    CHECK(std::find(keys.begin(), keys.end(), key) != keys.end());
    ++count;
  }
  CHECK(count + 1 == keys.size());  // experiment.preset is never written
  CHECK(std::find(keys.begin(), keys.end(), "experiment.preset") != keys.end());
}

TEST_CASE("command line: tiny training run") {
  const fs::path dir = fs::temp_directory_path() / "steach_cli_train";
  fs::remove_all(dir);
  const auto cfg = write_tiny(dir, train::Mode::Plain);
  CHECK(run("train --config " + cfg.string() + " --seed 3 --out " + (dir / "out").string()) == 0);
  const auto rows = lines_of(dir / "out" / "metrics.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "# schema=steach-metrics-v1 seed=3 mode=plain name=tiny");
  CHECK(rows[1] == train::metrics_header());

  // --epochs extends the run through resume
  CHECK(run("train --config " + cfg.string() + " --seed 3 --epochs 3 --resume " +
            (dir / "out" / "final_state.bin").string() + " --out " + (dir / "out").string()) == 0);
  CHECK(lines_of(dir / "out" / "metrics.csv").size() == 5);

  const auto eval = capture("eval " + (dir / "out" / "student_policy.bin").string() + " --config " + cfg.string() +
                            " --eval-episodes 2");
  CHECK(eval.find("episodes,2") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("command line: failures exit nonzero") {
  const fs::path dir = fs::temp_directory_path() / "steach_cli_fail";
  fs::remove_all(dir);
  const auto cfg = write_tiny(dir, train::Mode::Plain);
  { std::ofstream(dir / "blocker") << "x"; }
  CHECK(run("train --config " + cfg.string() + " --out " + (dir / "blocker" / "out").string()) != 0);
  CHECK(run("eval " + (dir / "missing.bin").string() + " --preset mountaincar-homogeneous") != 0);
  CHECK(run("train --preset nope") == 2);
  CHECK(run("frobnicate") != 0);
  { std::ofstream(dir / "bad.ini") << "[surprise]\neta0_S = -1\n"; }
  CHECK(run("train --config " + (dir / "bad.ini").string() + " --out " + (dir / "x").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("command line: an untrained mountain car policy never reaches the goal") {
  const fs::path file = fs::temp_directory_path() / "steach_cli_fresh_policy.bin";
  train::TrainingState s(cli::preset("mountaincar-homogeneous"));
  train::save_policy(file, s.student_policy);
  const auto out = capture("eval " + file.string() + " --preset mountaincar-homogeneous --agent student --eval-episodes 20");
  fs::remove(file);
  CHECK(out.find("episodes,20\nmean_return,0\n") != std::string::npos);
}

TEST_CASE("command line: compare writes aggregates per mode") {
  const fs::path dir = fs::temp_directory_path() / "steach_cli_compare";
  fs::remove_all(dir);
  const auto cfg = write_tiny(dir, train::Mode::Full);
  CHECK(run("compare --config " + cfg.string() + " --seeds 0-1 --modes full,plain --epochs 1 --out " +
            (dir / "out").string()) == 0);
  const auto rows = lines_of(dir / "out" / "comparison.csv");
  int aggregates = 0;
  for (const auto& r : rows) aggregates += r.rfind("aggregate,", 0) == 0;
  CHECK(rows.size() == 7);
  CHECK(aggregates == 2);
  fs::remove_all(dir);
}
