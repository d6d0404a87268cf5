#include "steach/cli/config_file.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "steach/cli/presets.hpp"
#include "steach/common/error.hpp"
#include "steach/common/format.hpp"

namespace steach::cli {

namespace {

using train::ExperimentConfig;

struct Binding {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double real_in(const std::string& v, const std::string& what, double lo, double hi) {
  const double x = parse_double(v, what);
  if (!(x >= lo && x <= hi)) {
    throw ConfigError(what + ": value " + v + " outside [" + format_double(lo) + ", " + format_double(hi) + "]");
  }
  return x;
}

int int_in(const std::string& v, const std::string& what, long long lo, long long hi) {
  const long long x = parse_integer(v, what);
  if (x < lo || x > hi) {
    throw ConfigError(what + ": value " + v + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

std::string list_to_string(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::vector<int> parse_list(const std::string& v, const std::string& what) {
  std::vector<int> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(int_in(trim(item), what, 1, 1 << 20));
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kIntMax = std::numeric_limits<int>::max();

#define REAL(SEC, KEY, FIELD, LO, HI)                                                              \
  Binding {                                                                                        \
    SEC, KEY, [](const ExperimentConfig& c) { return format_double(c.FIELD); },                    \
        [](ExperimentConfig& c, const std::string& v) { c.FIELD = real_in(v, SEC "." KEY, LO, HI); } \
  }
#define INT(SEC, KEY, FIELD, LO, HI)                                                                \
  Binding {                                                                                         \
    SEC, KEY, [](const ExperimentConfig& c) { return std::to_string(c.FIELD); },                    \
        [](ExperimentConfig& c, const std::string& v) { c.FIELD = int_in(v, SEC "." KEY, LO, HI); } \
  }
#define LIST(SEC, KEY, FIELD)                                                                      \
  Binding {                                                                                        \
    SEC, KEY, [](const ExperimentConfig& c) { return list_to_string(c.FIELD); },                   \
        [](ExperimentConfig& c, const std::string& v) { c.FIELD = parse_list(v, SEC "." KEY); }    \
  }

void add_env(std::vector<Binding>& b, const std::string& section, envs::EnvParams ExperimentConfig::*env) {
  auto real = [&](const char* key, double envs::EnvParams::*field, double lo, double hi) {
    const std::string what = section + "." + key;
    b.push_back({section, key,
                 [env, field](const ExperimentConfig& c) { return format_double((c.*env).*field); },
                 [env, field, what, lo, hi](ExperimentConfig& c, const std::string& v) {
                   (c.*env).*field = real_in(v, what, lo, hi);
                 }});
  };
  auto integer = [&](const char* key, int envs::EnvParams::*field, int lo) {
    const std::string what = section + "." + key;
    b.push_back({section, key,
                 [env, field](const ExperimentConfig& c) { return std::to_string((c.*env).*field); },
                 [env, field, what, lo](ExperimentConfig& c, const std::string& v) {
                   (c.*env).*field = int_in(v, what, lo, kIntMax);
                 }});
  };
  b.push_back({section, "family",
               [env](const ExperimentConfig& c) { return std::string(envs::to_string((c.*env).family)); },
               [env](ExperimentConfig& c, const std::string& v) { (c.*env).family = envs::parse_family(v); }});
  const double tiny = std::numeric_limits<double>::min();
  real("power", &envs::EnvParams::power, tiny, kInf);
  real("goal_x", &envs::EnvParams::goal_x, -kInf, kInf);
  real("pole_mass", &envs::EnvParams::pole_mass, tiny, kInf);
  real("cart_mass", &envs::EnvParams::cart_mass, tiny, kInf);
  real("pole_half_length", &envs::EnvParams::pole_half_length, tiny, kInf);
  real("x_limit", &envs::EnvParams::x_limit, tiny, kInf);
  real("upright_cosine_threshold", &envs::EnvParams::upright_cosine_threshold, tiny, 1.0);
  integer("horizon", &envs::EnvParams::horizon, 1);
  real("gravity", &envs::EnvParams::gravity, -kInf, kInf);
  real("timestep", &envs::EnvParams::timestep, tiny, kInf);
  integer("substeps", &envs::EnvParams::substeps, 1);
  real("force_scale", &envs::EnvParams::force_scale, tiny, kInf);
}

void add_adam(std::vector<Binding>& b, const std::string& section, nn::AdamConfig& (*pick)(ExperimentConfig&),
              const nn::AdamConfig& (*cpick)(const ExperimentConfig&)) {
  auto real = [&](const char* key, double nn::AdamConfig::*field, double lo, double hi) {
    const std::string what = section + "." + key;
    b.push_back({section, key, [cpick, field](const ExperimentConfig& c) { return format_double(cpick(c).*field); },
                 [pick, field, what, lo, hi](ExperimentConfig& c, const std::string& v) {
                   pick(c).*field = real_in(v, what, lo, hi);
                 }});
  };
  const double tiny = std::numeric_limits<double>::min();
  real("step_size", &nn::AdamConfig::step_size, tiny, kInf);
  real("beta1", &nn::AdamConfig::beta1, 0.0, 1.0 - 1e-16);
  real("beta2", &nn::AdamConfig::beta2, 0.0, 1.0 - 1e-16);
  real("epsilon", &nn::AdamConfig::epsilon, tiny, kInf);
}

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = [] {
    std::vector<Binding> b;
    b.push_back({"experiment", "name", [](const ExperimentConfig& c) { return c.name; },
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v.empty() || v.find_first_of(" \t,#;=[]") != std::string::npos) {
                     throw ConfigError("experiment.name: must be non-empty without spaces or ,#;=[]");
                   }
                   c.name = v;
                 }});
    b.push_back({"experiment", "mode", [](const ExperimentConfig& c) { return std::string(train::to_string(c.mode)); },
                 [](ExperimentConfig& c, const std::string& v) { c.mode = train::parse_mode(v); }});
    b.push_back({"experiment", "seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                 [](ExperimentConfig& c, const std::string& v) {
                   const long long s = parse_integer(v, "experiment.seed");
                   if (s < 0) throw ConfigError("experiment.seed: must be >= 0");
                   c.seed = static_cast<std::uint64_t>(s);
                 }});
    b.push_back(INT("experiment", "epochs", epochs, 1, kIntMax));
    b.push_back(INT("experiment", "steps_per_epoch", steps_per_epoch, 1, kIntMax));
    b.push_back(INT("experiment", "demo_steps", demo_steps, 1, kIntMax));
    b.push_back(INT("experiment", "student_rollout_steps", student_rollout_steps, 1, kIntMax));
    b.push_back(INT("experiment", "eval_episodes", eval_episodes, 1, kIntMax));
    b.push_back(INT("experiment", "warmup_steps", warmup_steps, 1, kIntMax));
    b.push_back(INT("experiment", "demo_dump_every", demo_dump_every, 0, kIntMax));
    b.push_back(INT("experiment", "checkpoint_every", checkpoint_every, 0, kIntMax));
    add_env(b, "teacher_env", &ExperimentConfig::teacher_env);
    add_env(b, "student_env", &ExperimentConfig::student_env);
    b.push_back(REAL("surprise", "eta0_T", weights.eta0_T, 0.0, kInf));
    b.push_back(REAL("surprise", "eta0_S", weights.eta0_S, 0.0, kInf));
    b.push_back({"surprise", "center_intrinsic",
                 [](const ExperimentConfig& c) { return std::string(c.center_intrinsic ? "true" : "false"); },
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v != "true" && v != "false") throw ConfigError("surprise.center_intrinsic: expected true or false");
                   c.center_intrinsic = v == "true";
                 }});
    b.push_back(LIST("networks", "dynamics_hidden", networks.dynamics_hidden));
    b.push_back(LIST("networks", "policy_hidden", networks.policy_hidden));
    b.push_back(LIST("networks", "value_hidden", networks.value_hidden));
    b.push_back(REAL("networks", "init_log_std", networks.init_log_std, -5.0, 2.0));
    b.push_back(INT("dynamics", "buffer_capacity", dynamics.buffer_capacity, 1, kIntMax));
    b.push_back(INT("dynamics", "fit_epochs", dynamics.fit_epochs, 0, kIntMax));
    b.push_back(INT("dynamics", "batch_size", dynamics.batch_size, 1, kIntMax));
    add_adam(b, "dynamics", [](ExperimentConfig& c) -> nn::AdamConfig& { return c.dynamics.adam; },
             [](const ExperimentConfig& c) -> const nn::AdamConfig& { return c.dynamics.adam; });
    b.push_back(REAL("dynamics", "logvar_min", dynamics.logvar_min, -kInf, 0.0));
    b.push_back(REAL("dynamics", "logvar_max", dynamics.logvar_max, 0.0, kInf));
    b.push_back(REAL("trpo", "kl_limit", teacher.trpo.kl_limit, std::numeric_limits<double>::min(), kInf));
    b.push_back(INT("trpo", "cg_iters", teacher.trpo.cg_iters, 1, kIntMax));
    b.push_back(REAL("trpo", "backtrack_coeff", teacher.trpo.backtrack_coeff, 1e-12, 1.0 - 1e-12));
    b.push_back(INT("trpo", "backtrack_iters", teacher.trpo.backtrack_iters, 1, kIntMax));
    b.push_back(REAL("trpo", "damping", teacher.trpo.damping, 0.0, kInf));
    b.push_back(REAL("trpo", "kl_accept_factor", teacher.trpo.kl_accept_factor, 1.0, kInf));
    b.push_back(REAL("trpo", "gamma", teacher.gamma, 0.0, 1.0));
    b.push_back(REAL("trpo", "lambda", teacher.lambda, 0.0, 1.0));
    b.push_back(INT("value", "epochs", value.epochs, 0, kIntMax));
    b.push_back(INT("value", "batch_size", value.batch_size, 1, kIntMax));
    add_adam(b, "value", [](ExperimentConfig& c) -> nn::AdamConfig& { return c.value.adam; },
             [](const ExperimentConfig& c) -> const nn::AdamConfig& { return c.value.adam; });
    b.push_back(INT("bc", "epochs", bc.epochs, 0, kIntMax));
    b.push_back(INT("bc", "batch_size", bc.batch_size, 1, kIntMax));
    add_adam(b, "bc", [](ExperimentConfig& c) -> nn::AdamConfig& { return c.bc.adam; },
             [](const ExperimentConfig& c) -> const nn::AdamConfig& { return c.bc.adam; });
    return b;
  }();
  return table;
}

#undef REAL
#undef INT
#undef LIST

const Binding* find_binding(const std::string& section, const std::string& key) {
  for (const auto& b : bindings())
    if (b.section == section && b.key == key) return &b;
  return nullptr;
}

struct Entry {
  int line;
  std::string section;
  std::string key;
  std::string value;
};

}  // namespace

std::vector<std::string> known_keys() {
  std::vector<std::string> out{"experiment.preset"};
  for (const auto& b : bindings()) out.push_back(b.section + "." + b.key);
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<Entry> entries;
  std::string preset_name;
  int preset_line = 0;
  {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      const auto hash = raw.find_first_of("#;");
      std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        const auto& all = bindings();
        if (std::none_of(all.begin(), all.end(), [&](const Binding& b) { return b.section == section; })) {
          throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      Entry e{line_no, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
      if (e.section.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": key '" + e.key + "' outside any section");
      }
      if (e.section == "experiment" && e.key == "preset") {
        preset_name = e.value;
        preset_line = line_no;
        continue;
      }
      if (!find_binding(e.section, e.key)) {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + e.section + "." + e.key + "'");
      }
      entries.push_back(std::move(e));
    }
  }

  ExperimentConfig config;
  if (!preset_name.empty()) {
    try {
      config = preset(preset_name);
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(preset_line) + ": experiment.preset: " + err.what());
    }
  }
  for (const auto& e : entries) {
    try {
      find_binding(e.section, e.key)->set(config, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
    }
  }
  config.validate();
  return config;
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& b : bindings()) {
    if (b.section != section) {
      if (!section.empty()) out << '\n';
      section = b.section;
      out << '[' << section << "]\n";
    }
    out << b.key << " = " << b.get(config) << '\n';
  }
  return out.str();
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace steach::cli
