// steach: train, compare, sweep and evaluate Teacher/Student runs.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "steach/cli/config_file.hpp"
#include "steach/cli/presets.hpp"
#include "steach/common/error.hpp"
#include "steach/common/format.hpp"
#include "steach/common/rng.hpp"
#include "steach/student/student.hpp"
#include "steach/train/checkpoint.hpp"
#include "steach/train/comparison.hpp"
#include "steach/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace steach;

namespace {

constexpr const char* kOutDirEnv = "STEACH_OUT_DIR";

struct Common {
  std::string config_path;
  std::string preset_name;
  std::string out;
  std::optional<long long> epochs;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Experiment config file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", c.preset_name, "Named preset (see `steach presets`)");
  cmd->add_option("--out", c.out, "Output directory (default: $STEACH_OUT_DIR, else runs/<name>)");
  cmd->add_option("--epochs", c.epochs, "Override the number of epochs");
}

train::ExperimentConfig load(const Common& c) {
  if (!c.config_path.empty() && !c.preset_name.empty()) {
    throw UsageError("--config and --preset are mutually exclusive (a config file may name a preset itself)");
  }
  train::ExperimentConfig config;
  if (!c.config_path.empty()) config = cli::load_config_file(c.config_path);
  else if (!c.preset_name.empty()) config = cli::preset(c.preset_name);
  if (c.epochs) {
    if (*c.epochs < 1) throw ConfigError("--epochs must be >= 1");
    config.epochs = static_cast<int>(*c.epochs);
  }
  return config;
}

fs::path out_dir(const Common& c, const train::ExperimentConfig& config) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return fs::path("runs") / config.name;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-', 1);
    if (dash != std::string::npos) {
      const long long lo = parse_integer(item.substr(0, dash), "--seeds");
      const long long hi = parse_integer(item.substr(dash + 1), "--seeds");
      if (lo < 0 || hi < lo) throw ConfigError("--seeds: bad range '" + item + "'");
      for (long long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    } else {
      const long long s = parse_integer(item, "--seeds");
      if (s < 0) throw ConfigError("--seeds: negative seed");
      seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (seeds.empty()) throw ConfigError("--seeds: empty list");
  return seeds;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& text, F parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(item));
  return out;
}

void write_table(const fs::path& path, const train::ComparisonTable& table) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  train::write_comparison_csv(f, table);
  train::write_comparison_csv(std::cout, table);
}

int run(int argc, char** argv) {
  CLI::App app{"Teacher/Student surprise-shaped training"};
  app.require_subcommand(1);

  Common train_opts;
  std::optional<long long> seed;
  std::string mode;
  std::string resume;
  auto* train_cmd = app.add_subcommand("train", "Run one experiment");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--seed", seed, "Override the config seed");
  train_cmd->add_option("--mode", mode, "full | surprise-max | plain");
  train_cmd->add_option("--resume", resume, "Continue from a saved training state")->check(CLI::ExistingFile);

  Common cmp_opts;
  std::string seeds_text = "0-4";
  std::string modes_text = "full,surprise-max";
  int workers = 1;
  auto* compare_cmd = app.add_subcommand("compare", "Run modes x seeds and aggregate final returns");
  add_common(compare_cmd, cmp_opts);
  compare_cmd->add_option("--seeds", seeds_text, "Seed list, e.g. 0,1,2 or 0-4")->capture_default_str();
  compare_cmd->add_option("--modes", modes_text, "Comma-separated modes")->capture_default_str();
  compare_cmd->add_option("--mode", modes_text, "Alias of --modes");
  compare_cmd->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

  Common sweep_opts;
  std::string sweep_seeds = "0-4";
  std::string eta_text = "0.001,0.005";
  int sweep_workers = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Full vs baseline over several Student surprise weights");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--seeds", sweep_seeds, "Seed list")->capture_default_str();
  sweep_cmd->add_option("--eta-s", eta_text, "eta0_S values")->capture_default_str();
  sweep_cmd->add_option("--workers", sweep_workers, "Concurrent runs")->check(CLI::PositiveNumber);

  std::string ckpt;
  std::string eval_config;
  std::string eval_preset;
  std::string agent = "student";
  int episodes = 20;
  long long eval_seed = 0;
  bool stochastic = false;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved policy or training state");
  eval_cmd->add_option("checkpoint", ckpt, "Policy file or training state")->required();
  eval_cmd->add_option("--config", eval_config, "Config giving the environment (policy files only)");
  eval_cmd->add_option("--preset", eval_preset, "Preset giving the environment (policy files only)");
  eval_cmd->add_option("--agent", agent, "teacher | student: which environment to use")->capture_default_str();
  eval_cmd->add_option("--eval-episodes", episodes, "Episodes")->check(CLI::PositiveNumber)->capture_default_str();
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed")->capture_default_str();
  eval_cmd->add_flag("--stochastic", stochastic, "Sample actions instead of using the mean");

  auto* presets_cmd = app.add_subcommand("presets", "List preset names");
  Common show_opts;
  auto* show_cmd = app.add_subcommand("show-config", "Print the fully expanded config");
  add_common(show_cmd, show_opts);

  CLI11_PARSE(app, argc, argv);

  if (*train_cmd) {
    train::ExperimentConfig config;
    train::ExperimentOptions options;
    if (!resume.empty()) {
      options.resume_from = resume;
      config = train::load_state(resume).config;
      if (train_opts.epochs) config.epochs = static_cast<int>(*train_opts.epochs);
    } else {
      config = load(train_opts);
      if (seed) {
        if (*seed < 0) throw ConfigError("--seed must be >= 0");
        config.seed = static_cast<std::uint64_t>(*seed);
      }
      if (!mode.empty()) config.mode = train::parse_mode(mode);
      config.validate();
    }
    options.out_dir = out_dir(train_opts, config);
    options.log = &std::cerr;
    const auto metrics = train::run_experiment(config, options);
    std::cout << "wrote " << metrics.size() << " epochs to " << options.out_dir.string() << '\n';
    return 0;
  }
  if (*compare_cmd) {
    const auto config = load(cmp_opts);
    train::ComparisonOptions options;
    options.out_dir = out_dir(cmp_opts, config);
    options.workers = workers;
    options.log = &std::cerr;
    const auto modes = parse_list<train::Mode>(modes_text, [](const std::string& s) { return train::parse_mode(s); });
    const auto table = train::run_comparison(config, modes, parse_seeds(seeds_text), options);
    write_table(options.out_dir / "comparison.csv", table);
    return 0;
  }
  if (*sweep_cmd) {
    const auto config = load(sweep_opts);
    train::ComparisonOptions options;
    options.out_dir = out_dir(sweep_opts, config);
    options.workers = sweep_workers;
    options.log = &std::cerr;
    const auto etas = parse_list<double>(eta_text, [](const std::string& s) {
      const double v = parse_double(s, "--eta-s");
      if (!(v >= 0.0)) throw ConfigError("--eta-s values must be >= 0");
      return v;
    });
    const auto table = train::run_sweep(config, etas, parse_seeds(sweep_seeds), options);
    write_table(options.out_dir / "sweep.csv", table);
    return 0;
  }
  if (*eval_cmd) {
    if (!fs::exists(ckpt)) throw IoError("checkpoint '" + ckpt + "' not found");
    std::ifstream probe(ckpt, std::ios::binary);
    char tag[8] = {};
    probe.read(tag, 8);
    policy::GaussianPolicy pol;
    train::ExperimentConfig config;
    const bool is_state = probe && std::string(tag, 8) == "STDSTAT1";
    if (agent != "teacher" && agent != "student") throw UsageError("--agent must be teacher or student");
    if (is_state) {
      const auto state = train::load_state(ckpt);
      config = state.config;
      pol = agent == "teacher" ? state.teacher_policy : state.student_policy;
    } else {
      pol = train::load_policy(ckpt);
      Common c;
      c.config_path = eval_config;
      c.preset_name = eval_preset;
      if (eval_config.empty() && eval_preset.empty()) {
        c.preset_name = pol.feature_map == envs::FeatureMap::CartPole ? "cartpole-homogeneous"
                                                                       : "mountaincar-homogeneous";
      }
      config = load(c);
    }
    const auto& env = agent == "teacher" ? config.teacher_env : config.student_env;
    if (eval_seed < 0) throw ConfigError("--seed must be >= 0");
    Rng rng(static_cast<std::uint64_t>(eval_seed));
    const auto r = student::evaluate(pol, env, episodes, rng,
                                     stochastic ? policy::ActionMode::Stochastic : policy::ActionMode::Deterministic);
    std::cout << "episodes," << episodes << "\nmean_return," << format_double(r.mean_return) << "\nstd_return,"
              << format_double(r.std_return) << '\n';
    return 0;
  }
  if (*presets_cmd) {
    for (const auto& n : cli::preset_names()) std::cout << n << '\n';
    return 0;
  }
  if (*show_cmd) {
    std::cout << cli::serialize_config(load(show_opts));
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const StageError& e) {
    std::cerr << "steach: stage " << e.stage() << ": " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "steach: config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "steach: usage error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "steach: io error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "steach: " << e.what() << '\n';
    return 1;
  }
}
