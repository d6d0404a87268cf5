#include "steach/train/trainer.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "steach/cli/config_file.hpp"
#include "steach/common/error.hpp"
#include "steach/common/format.hpp"
#include "steach/dynamics/checkpoint.hpp"
#include "steach/envs/env.hpp"
#include "steach/policy/gae.hpp"
#include "steach/policy/rollout.hpp"
#include "steach/policy/trpo.hpp"
#include "steach/surprise/surprise.hpp"
#include "steach/train/checkpoint.hpp"

namespace steach::train {

namespace fs = std::filesystem;

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::FitTeacherModel: return "fit_teacher_model";
    case Stage::TeacherUpdate: return "teacher_update";
    case Stage::Demonstrations: return "demonstrations";
    case Stage::BehaviorClone: return "behavior_clone";
    case Stage::StudentRollouts: return "student_rollouts";
    case Stage::FitStudentModel: return "fit_student_model";
    case Stage::Evaluate: return "evaluate";
  }
  return "unknown";
}

RngStreams RngStreams::from_seed(std::uint64_t seed) {
  auto stream = [seed](std::uint64_t k) { return Rng(mix_seed(seed, 100 + k)); };
  return {stream(0), stream(1), stream(2), stream(3), stream(4), stream(5), stream(6), stream(7)};
}

namespace {

dynamics::TransitionBuffer make_buffer(const ExperimentConfig& c, dynamics::Owner owner) {
  const auto info = envs::space_info(c.teacher_env);
  return dynamics::TransitionBuffer(info.state_dim, info.action_dim,
                                    static_cast<std::size_t>(c.dynamics.buffer_capacity), owner);
}

policy::GaussianPolicy make_policy(const ExperimentConfig& c, std::uint64_t stream) {
  const auto info = envs::space_info(c.teacher_env);
  return policy::GaussianPolicy::create(info.state_dim, info.action_dim, c.networks.policy_hidden,
                                        feature_map_for(c.teacher_env.family), info.action_low, info.action_high,
                                        c.networks.init_log_std, mix_seed(c.seed, stream));
}

dynamics::GaussianDynamicsModel make_model(const ExperimentConfig& c, dynamics::Owner owner, std::uint64_t stream) {
  const auto info = envs::space_info(c.teacher_env);
  return dynamics::GaussianDynamicsModel::create(info.state_dim, info.action_dim, c.networks.dynamics_hidden, owner,
                                                 mix_seed(c.seed, stream), c.dynamics.logvar_min,
                                                 c.dynamics.logvar_max);
}

dynamics::FitOptions fit_options(const ExperimentConfig& c) {
  dynamics::FitOptions o;
  o.epochs = c.dynamics.fit_epochs;
  o.batch_size = c.dynamics.batch_size;
  o.adam = c.dynamics.adam;
  o.report_buffer_loss = true;
  return o;
}

void push_all(dynamics::TransitionBuffer& buffer, const std::vector<policy::Trajectory>& trajs) {
  for (const auto& traj : trajs)
    for (const auto& step : traj.steps) buffer.push(step.s, step.applied_action, step.s_next);
}

// Returns of the finished episodes; the trailing partial episode counts only
// when nothing finished.
student::EvalResult rollout_returns(const std::vector<policy::Trajectory>& trajs) {
  std::vector<double> returns;
  for (const auto& t : trajs)
    if (t.complete) returns.push_back(t.extrinsic_return());
  if (returns.empty())
    for (const auto& t : trajs) returns.push_back(t.extrinsic_return());
  return student::summarize_returns(std::move(returns));
}

struct TeacherUpdateOutput {
  double teacher_mean_return = 0.0;
  double teacher_std_return = 0.0;
  int teacher_episodes = 0;
  double mean_teacher_surprise = 0.0;
  double mean_student_surprise = 0.0;
  double eta_T = 0.0;
  double eta_S = 0.0;
  double mean_intrinsic_reward = 0.0;
  policy::TrpoStats trpo;
  double value_loss = 0.0;
};

// The Teacher sees the Student only through its learned model and its reward
// list; the Student environment is deliberately not a parameter.
TeacherUpdateOutput teacher_update(const ExperimentConfig& c, policy::GaussianPolicy& teacher_policy,
                                   policy::ValueFunction& value_fn, nn::OptimizerState& value_opt,
                                   dynamics::TransitionBuffer& teacher_buffer,
                                   const dynamics::GaussianDynamicsModel& teacher_model,
                                   const dynamics::GaussianDynamicsModel& student_model,
                                   const std::vector<double>& student_rewards, Rng& rollout_rng, Rng& value_rng) {
  TeacherUpdateOutput out;
  const auto trajs = policy::collect_rollouts(c.teacher_env, teacher_policy, c.steps_per_epoch, rollout_rng);
  const std::vector<double> teacher_rewards = policy::extrinsic_rewards(trajs);
  const std::vector<double> no_student_rewards{0.0};
  const auto shaped = surprise::shape_rollout(trajs, teacher_model, student_model, c.effective_weights(),
                                              teacher_rewards,
                                              student_rewards.empty() ? no_student_rewards : student_rewards);

  double r_int_mean = 0.0;
  if (c.center_intrinsic) {
    std::size_t count = 0;
    for (const auto& traj : shaped)
      for (const auto& st : traj) r_int_mean += st.r_int, ++count;
    r_int_mean /= static_cast<double>(std::max<std::size_t>(count, 1));
  }

  std::vector<std::vector<double>> rewards;
  const auto n = static_cast<Eigen::Index>(policy::total_steps(trajs));
  const auto info = envs::space_info(c.teacher_env);
  policy::TrpoBatch batch{Eigen::MatrixXd(info.state_dim, n), Eigen::MatrixXd(info.action_dim, n),
                          Eigen::VectorXd(n)};
  Eigen::Index j = 0;
  double sum_ts = 0.0, sum_ss = 0.0, sum_int = 0.0;
  for (const auto& traj : shaped) {
    std::vector<double> r;
    r.reserve(traj.size());
    for (const auto& st : traj) {
      r.push_back(st.total_reward() - r_int_mean);
      batch.states.col(j) = st.base.s;
      batch.actions.col(j) = st.base.action;
      batch.old_log_probs(j) = st.base.log_prob;
      sum_ts += st.teacher_surprise;
      sum_ss += st.student_surprise;
      sum_int += st.r_int;
      ++j;
    }
    rewards.push_back(std::move(r));
  }
  if (!shaped.empty() && !shaped.front().empty()) {
    out.eta_T = shaped.front().front().eta_T_used;
    out.eta_S = shaped.front().front().eta_S_used;
  }
  out.mean_teacher_surprise = sum_ts / static_cast<double>(n);
  out.mean_student_surprise = sum_ss / static_cast<double>(n);
  out.mean_intrinsic_reward = sum_int / static_cast<double>(n);

  const auto adv = policy::gae_advantages(trajs, value_fn, c.teacher.gamma, c.teacher.lambda, rewards);
  auto result = policy::trpo_update(teacher_policy, batch, adv.advantages, c.teacher.trpo);
  teacher_policy = std::move(result.policy);
  out.trpo = result.stats;

  const auto vfit = policy::fit_value(value_fn, batch.states, adv.value_targets, c.value, value_opt, value_rng);
  out.value_loss = vfit.loss_after;

  push_all(teacher_buffer, trajs);
  const auto returns = rollout_returns(trajs);
  out.teacher_mean_return = returns.mean_return;
  out.teacher_std_return = returns.std_return;
  out.teacher_episodes = static_cast<int>(returns.per_episode.size());
  return out;
}

student::DemonstrationSet demonstrations(const ExperimentConfig& c, const policy::GaussianPolicy& teacher_policy,
                                         const dynamics::GaussianDynamicsModel& teacher_model,
                                         const dynamics::GaussianDynamicsModel& student_model, int epoch, Rng& rng) {
  const auto trajs = policy::collect_rollouts(c.teacher_env, teacher_policy, c.demo_steps, rng);
  auto demos = student::make_demonstrations(trajs, epoch);
  Eigen::MatrixXd s_next(demos.states.rows(), demos.size());
  Eigen::Index j = 0;
  for (const auto& t : trajs)
    for (const auto& step : t.steps) s_next.col(j++) = step.s_next;
  demos.teacher_surprise = surprise::teacher_surprise_batch(teacher_model, demos.states, demos.actions, s_next);
  demos.student_surprise = surprise::student_surprise_batch(teacher_model, student_model, demos.states, demos.actions);
  return demos;
}

}  // namespace

TrainingState::TrainingState(const ExperimentConfig& cfg)
    : config(cfg),
      teacher_policy(make_policy(cfg, 1)),
      value_fn(policy::ValueFunction::create(envs::space_info(cfg.teacher_env).state_dim, cfg.networks.value_hidden,
                                             feature_map_for(cfg.teacher_env.family), mix_seed(cfg.seed, 2))),
      student_policy(make_policy(cfg, 3)),
      teacher_model(make_model(cfg, dynamics::Owner::Teacher, 4)),
      student_model(make_model(cfg, dynamics::Owner::Student, 5)),
      teacher_buffer(make_buffer(cfg, dynamics::Owner::Teacher)),
      student_buffer(make_buffer(cfg, dynamics::Owner::Student)),
      rng(RngStreams::from_seed(cfg.seed)) {
  config.validate();
}

void TrainingState::initialize() {
  Rng warm(mix_seed(config.seed, 99));
  const auto info = envs::space_info(config.teacher_env);
  envs::EnvState s = envs::reset(config.teacher_env, warm);
  Eigen::VectorXd a(info.action_dim);
  for (int i = 0; i < config.warmup_steps; ++i) {
    for (int k = 0; k < info.action_dim; ++k) a(k) = warm.uniform(info.action_low(k), info.action_high(k));
    const auto r = envs::step(config.teacher_env, s, a);
    teacher_buffer.push(s.x, a, r.next_state.x);
    s = r.done ? envs::reset(config.teacher_env, warm) : r.next_state;
  }
}

bool operator==(const TrainingState& a, const TrainingState& b) {
  return a.config == b.config && a.epoch == b.epoch && a.teacher_policy == b.teacher_policy &&
         a.value_fn == b.value_fn && a.student_policy == b.student_policy && a.teacher_model == b.teacher_model &&
         a.student_model == b.student_model && a.teacher_buffer == b.teacher_buffer &&
         a.student_buffer == b.student_buffer && a.teacher_model_opt == b.teacher_model_opt &&
         a.student_model_opt == b.student_model_opt && a.value_opt == b.value_opt && a.bc_opt == b.bc_opt &&
         a.rng == b.rng && a.student_rewards == b.student_rewards;
}

std::pair<TrainingState, EpochOutput> run_epoch(const TrainingState& state, const StageObserver& observer) {
  TrainingState next = state;
  EpochOutput out;
  const ExperimentConfig& c = next.config;
  EpochMetrics& m = out.metrics;
  m.epoch = state.epoch;
  out.timings.epoch = state.epoch;
  const auto epoch_start = std::chrono::steady_clock::now();

  auto stage = [&](Stage st, auto&& body) {
    if (observer) observer(st);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const std::exception& e) {
      throw StageError(std::string(to_string(st)), e.what());
    }
    out.timings.stage_ms[static_cast<int>(st)] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  stage(Stage::FitTeacherModel, [&] {
    const auto r = dynamics::fit(next.teacher_model, next.teacher_buffer, fit_options(c), next.teacher_model_opt,
                                 next.rng.teacher_model_fit);
    m.teacher_model_nll = r.buffer_loss_after;
  });

  stage(Stage::TeacherUpdate, [&] {
    const auto r = teacher_update(c, next.teacher_policy, next.value_fn, next.value_opt, next.teacher_buffer,
                                  next.teacher_model, next.student_model, next.student_rewards,
                                  next.rng.teacher_rollout, next.rng.value_fit);
    m.teacher_mean_return = r.teacher_mean_return;
    m.teacher_std_return = r.teacher_std_return;
    m.teacher_episodes = r.teacher_episodes;
    m.mean_teacher_surprise = r.mean_teacher_surprise;
    m.mean_student_surprise = r.mean_student_surprise;
    m.eta_T = r.eta_T;
    m.eta_S = r.eta_S;
    m.mean_intrinsic_reward = r.mean_intrinsic_reward;
    m.trpo_kl = r.trpo.kl;
    m.trpo_improvement = r.trpo.improvement();
    m.trpo_accepted = r.trpo.accepted ? 1 : 0;
    m.value_loss = r.value_loss;
  });

  stage(Stage::Demonstrations, [&] {
    out.demos = demonstrations(c, next.teacher_policy, next.teacher_model, next.student_model, state.epoch,
                               next.rng.demo);
    m.demo_mean_abs_action = out.demos.actions.cwiseAbs().mean();
    m.demo_mean_student_surprise = out.demos.student_surprise.mean();
  });

  stage(Stage::BehaviorClone, [&] {
    const auto r = student::behavior_clone(next.student_policy, out.demos, c.bc, next.bc_opt, next.rng.bc);
    m.bc_loss = r.loss_after;
  });

  stage(Stage::StudentRollouts, [&] {
    const auto trajs =
        policy::collect_rollouts(c.student_env, next.student_policy, c.student_rollout_steps, next.rng.student_rollout);
    push_all(next.student_buffer, trajs);
    next.student_rewards = policy::extrinsic_rewards(trajs);
  });

  stage(Stage::FitStudentModel, [&] {
    const auto r = dynamics::fit(next.student_model, next.student_buffer, fit_options(c), next.student_model_opt,
                                 next.rng.student_model_fit);
    m.student_model_nll = r.buffer_loss_after;
  });

  stage(Stage::Evaluate, [&] {
    const auto r = student::evaluate(next.student_policy, c.student_env, c.eval_episodes, next.rng.eval,
                                     policy::ActionMode::Deterministic);
    m.student_mean_return = r.mean_return;
    m.student_std_return = r.std_return;
    auto finite = [](double v) { return std::isfinite(v); };
    for (double v : {m.teacher_mean_return, m.student_mean_return, m.mean_teacher_surprise, m.mean_student_surprise,
                     m.teacher_model_nll, m.student_model_nll, m.trpo_kl, m.value_loss, m.bc_loss}) {
      if (!finite(v)) throw NumericError("non-finite epoch metric: " + metrics_row(m));
    }
  });

  out.timings.total_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - epoch_start).count();
  ++next.epoch;
  return {std::move(next), std::move(out)};
}

fs::path state_checkpoint_path(const fs::path& out_dir, int epoch) {
  char name[64];
  std::snprintf(name, sizeof name, "state_epoch_%04d.bin", epoch);
  return out_dir / "checkpoints" / name;
}

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream f(path, std::ios::out | std::ios::binary | mode);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  return f;
}

// Keeps the leading `keep_header_lines` lines and the rows whose first field
// is an epoch index below `epoch`.
std::string truncated_log(const fs::path& path, int keep_header_lines, int epoch) {
  std::ifstream in(path, std::ios::binary);
  std::string out, line;
  int n = 0;
  while (std::getline(in, line)) {
    if (n++ < keep_header_lines) {
      out += line + '\n';
      continue;
    }
    const auto comma = line.find(',');
    const std::string first = line.substr(0, comma);
    if (!first.empty() && parse_integer(first, "log epoch") < epoch) out += line + '\n';
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

std::vector<EpochMetrics> run_experiment(const ExperimentConfig& config, const ExperimentOptions& options) {
  const fs::path& out = options.out_dir;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory '" + out.string() + "'");

  std::optional<TrainingState> state;
  if (options.resume_from) {
    state.emplace(load_state(*options.resume_from));
    state->config.epochs = config.epochs;
  } else {
    config.validate();
    state.emplace(config);
    state->initialize();
  }
  const ExperimentConfig& c = state->config;
  const int start = state->epoch;
  const int stop = std::min(c.epochs, options.stop_epoch.value_or(c.epochs));
  const auto info = envs::space_info(c.teacher_env);

  const fs::path metrics_path = out / "metrics.csv";
  const fs::path timing_path = out / "timing.csv";
  const fs::path demos_path = out / "demos.csv";
  const std::string preamble = metrics_preamble(c.seed, std::string(to_string(c.mode)), c.name);
  auto fresh_or_truncated = [&](const fs::path& p, const std::string& head, int head_lines) {
    if (options.resume_from && fs::exists(p)) return truncated_log(p, head_lines, start);
    return head;
  };
  write_file(metrics_path, fresh_or_truncated(metrics_path, preamble + '\n' + metrics_header() + '\n', 2));
  write_file(timing_path, fresh_or_truncated(timing_path, timings_header() + '\n', 1));
  if (c.demo_dump_every > 0) {
    write_file(demos_path, fresh_or_truncated(demos_path, student::demo_csv_header(info.state_dim) + '\n', 1));
  }
  write_file(out / "config.ini", cli::serialize_config(c));
  if (c.checkpoint_every > 0) {
    fs::create_directories(out / "checkpoints", ec);
    if (ec) throw IoError("cannot create '" + (out / "checkpoints").string() + "'");
  }

  std::ifstream existing(metrics_path, std::ios::binary);
  std::vector<EpochMetrics> log = read_metrics_csv(existing);
  auto metrics_file = open_out(metrics_path, std::ios::app);
  auto timing_file = open_out(timing_path, std::ios::app);
  std::ofstream demos_file;
  if (c.demo_dump_every > 0) demos_file = open_out(demos_path, std::ios::app);

  for (int epoch = start; epoch < stop; ++epoch) {
    auto [next, result] = run_epoch(*state, options.observer);
    *state = std::move(next);
    metrics_file << metrics_row(result.metrics) << '\n' << std::flush;
    timing_file << timings_row(result.timings) << '\n' << std::flush;
    if (!metrics_file || !timing_file) throw IoError("write failed under '" + out.string() + "'");
    if (c.demo_dump_every > 0 && (epoch % c.demo_dump_every == 0 || epoch == c.epochs - 1)) {
      student::append_demo_csv(demos_file, result.demos);
      demos_file.flush();
    }
    if (c.checkpoint_every > 0 && (epoch + 1) % c.checkpoint_every == 0) {
      save_state(state_checkpoint_path(out, epoch), *state);
    }
    if (options.log) {
      const auto& m = result.metrics;
      *options.log << c.name << " seed " << c.seed << " " << to_string(c.mode) << " epoch " << epoch + 1 << "/"
                   << c.epochs << " teacher " << format_double(m.teacher_mean_return) << " student "
                   << format_double(m.student_mean_return) << " kl " << format_double(m.trpo_kl) << " ("
                   << static_cast<long>(result.timings.total_ms) << " ms)\n"
                   << std::flush;
    }
    log.push_back(result.metrics);
  }

  save_state(out / "final_state.bin", *state);
  save_policy(out / "teacher_policy.bin", state->teacher_policy);
  save_policy(out / "student_policy.bin", state->student_policy);
  dynamics::save_model(out / "teacher_model.bin", state->teacher_model);
  dynamics::save_model(out / "student_model.bin", state->student_model);
  return log;
}

}  // namespace steach::train
