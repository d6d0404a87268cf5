// Checks the eight acceptance criteria and prints one PASS/FAIL line each.
// Training runs are cached under --runs so criteria sharing a run reuse it.

#include <CLI11.hpp>
#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "steach/cli/config_file.hpp"
#include "steach/cli/presets.hpp"
#include "steach/common/format.hpp"
#include "steach/common/rng.hpp"
#include "steach/dynamics/gaussian.hpp"
#include "steach/dynamics/model.hpp"
#include "steach/policy/gaussian_policy.hpp"
#include "steach/policy/value_function.hpp"
#include "steach/train/comparison.hpp"
#include "steach/train/trainer.hpp"

using namespace steach;
namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  fs::path runs_dir;
  int seeds = 5;
  int epochs = 0;  // 0 keeps the preset's budget
  int tail = 10;
  bool verbose = false;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- run cache

class RunCache {
 public:
  explicit RunCache(const Options& o) : opt_(o) {}

  std::vector<train::EpochMetrics> get(train::ExperimentConfig c, train::Mode mode, std::uint64_t seed) {
    c.mode = mode;
    c.seed = seed;
    if (opt_.epochs > 0) c.epochs = opt_.epochs;
    const std::string tag = c.name + "/" + std::string(train::to_string(mode)) + "/eta0_S_" +
                            format_double(c.weights.eta0_S) + "/seed_" + std::to_string(seed);
    // The baseline ignores eta0_S, so every Student weight shares one run.
    const std::string key = mode == train::Mode::Full
                                ? tag
                                : c.name + "/" + std::string(train::to_string(mode)) + "/seed_" + std::to_string(seed);
    const fs::path dir = opt_.runs_dir / key;
    if (mode != train::Mode::Full) c.weights.eta0_S = 0.0;
    const std::string wanted = cli::serialize_config(c);
    if (fs::exists(dir / "metrics.csv") && fs::exists(dir / "config.ini") && slurp(dir / "config.ini") == wanted) {
      std::ifstream in(dir / "metrics.csv");
      auto m = train::read_metrics_csv(in);
      if (static_cast<int>(m.size()) == c.epochs) return m;
    }
    const auto start = std::chrono::steady_clock::now();
    train::ExperimentOptions eo;
    eo.out_dir = dir;
    auto m = train::run_experiment(c, eo);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (opt_.verbose) std::cerr << "  ran " << key << " (" << fmt(secs) << " s)\n";
    return m;
  }

  train::RunSummary summary(const train::ExperimentConfig& c, train::Mode mode, std::uint64_t seed) {
    return train::summarize_run(mode, seed, c.weights.eta0_S, get(c, mode, seed), opt_.tail);
  }

  std::vector<train::RunSummary> seeds(const train::ExperimentConfig& c, train::Mode mode) {
    std::vector<train::RunSummary> out;
    for (int s = 0; s < opt_.seeds; ++s) out.push_back(summary(c, mode, static_cast<std::uint64_t>(s)));
    return out;
  }

 private:
  Options opt_;
};

double mean_of(const std::vector<train::RunSummary>& runs, double train::RunSummary::*field) {
  double acc = 0.0;
  for (const auto& r : runs) acc += r.*field;
  return runs.empty() ? 0.0 : acc / static_cast<double>(runs.size());
}

// ------------------------------------------------------------- criterion 1

VectorXd numeric_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& x) {
  const double h = 1e-6;
  VectorXd g(x.size()), p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double o = p(i);
    p(i) = o + h;
    const double up = f(p);
    p(i) = o - h;
    const double down = f(p);
    p(i) = o;
    g(i) = (up - down) / (2 * h);
  }
  return g;
}

double max_rel_err(const VectorXd& a, const VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a(i) - b(i)) / std::max({1.0, std::abs(a(i)), std::abs(b(i))}));
  return worst;
}

Outcome math_oracles() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2024);

  // Closed-form KL against a 10^6-sample estimate for 100 random model pairs.
  double worst_kl = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const int dim = pair % 2 == 0 ? 2 : 4;
    auto mt = dynamics::GaussianDynamicsModel::create(dim, 1, {16}, dynamics::Owner::Teacher, rng.next_u64());
    auto ms = dynamics::GaussianDynamicsModel::create(dim, 1, {16}, dynamics::Owner::Student, rng.next_u64());
    for (auto* m : {&mt, &ms}) {
      VectorXd flat = nn::flatten(m->trunk);
      for (auto& v : flat) v = rng.uniform(-0.7, 0.7);
      nn::assign_flat(m->trunk, flat);
    }
    VectorXd s(dim), a(1);
    for (auto& v : s) v = rng.uniform(-1, 1);
    a(0) = rng.uniform(-1, 1);
    const auto p = dynamics::predict(mt, s, a);
    const auto q = dynamics::predict(ms, s, a);
    const double closed = dynamics::kl_divergence(p, q);
    const int n = 1000000;
    double acc = 0.0;
    VectorXd x(dim);
    const VectorXd sd = p.variance.cwiseSqrt();
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < dim; ++k) x(k) = p.mean(k) + sd(k) * rng.normal();
      acc += dynamics::negative_log_density(q, x) - dynamics::negative_log_density(p, x);
    }
    worst_kl = std::max(worst_kl, std::abs(acc / n - closed) / closed);
  }

  // Model loss against a scalar loop over samples and dimensions.
  double worst_loss = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto m = dynamics::GaussianDynamicsModel::create(3, 1, {8, 8}, dynamics::Owner::Teacher, rng.next_u64());
    VectorXd flat = nn::flatten(m.trunk);
    for (auto& v : flat) v = rng.uniform(-0.5, 0.5);
    nn::assign_flat(m.trunk, flat);
    MatrixXd S(3, 9), A(1, 9), Sn(3, 9);
    for (auto* M : {&S, &A, &Sn})
      for (auto& v : M->reshaped()) v = rng.uniform(-1, 1);
    double scalar = 0.0;
    for (Eigen::Index i = 0; i < S.cols(); ++i) {
      const auto d = dynamics::predict(m, S.col(i), A.col(i));
      for (Eigen::Index k = 0; k < 3; ++k) {
        const double r = d.mean(k) - Sn(k, i);
        scalar += r * r / d.variance(k) + std::log(d.variance(k));
      }
    }
    const double module = dynamics::nll_loss(m, S, A, Sn).loss;
    worst_loss = std::max(worst_loss, std::abs(module - scalar) / std::max(1.0, std::abs(module)));
  }

  // Analytic gradients against central differences.
  double worst_grad = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    auto m = dynamics::GaussianDynamicsModel::create(2, 1, {16, 16}, dynamics::Owner::Teacher, rng.next_u64());
    VectorXd flat = nn::flatten(m.trunk);
    for (auto& v : flat) v = rng.uniform(-0.3, 0.3);
    nn::assign_flat(m.trunk, flat);
    MatrixXd S(2, 6), A(1, 6), Sn(2, 6);
    for (auto* M : {&S, &A, &Sn})
      for (auto& v : M->reshaped()) v = rng.uniform(-1, 1);
    const auto res = dynamics::nll_loss(m, S, A, Sn);
    worst_grad = std::max(worst_grad, max_rel_err(numeric_gradient(
                                                      [&](const VectorXd& t) {
                                                        auto c = m;
                                                        nn::assign_flat(c.trunk, t);
                                                        return dynamics::nll_loss(c, S, A, Sn).loss;
                                                      },
                                                      flat),
                                                  res.gradient));

    const auto pol = policy::GaussianPolicy::create(4, 1, {16, 16}, envs::FeatureMap::CartPole,
                                                    VectorXd::Constant(1, -1), VectorXd::Constant(1, 1), -0.5,
                                                    rng.next_u64());
    MatrixXd Sp(4, 8), Ap(1, 8);
    for (auto* M : {&Sp, &Ap})
      for (auto& v : M->reshaped()) v = rng.uniform(-1, 1);
    VectorXd w(8);
    for (auto& v : w) v = rng.uniform(-1, 1);
    const MatrixXd F = pol.features(Sp);
    worst_grad = std::max(worst_grad, max_rel_err(numeric_gradient(
                                                      [&](const VectorXd& t) {
                                                        auto c = pol;
                                                        c.set_flat_params(t);
                                                        return policy::log_prob_batch(c, F, Ap).dot(w);
                                                      },
                                                      pol.flat_params()),
                                                  policy::log_prob_grad(pol, F, Ap, w)));

    const auto vf = policy::ValueFunction::create(2, {16, 16}, envs::FeatureMap::MountainCar, rng.next_u64());
    VectorXd y(8);
    for (auto& v : y) v = rng.uniform(-1, 1);
    const MatrixXd Sv = Sp.topRows(2);
    worst_grad = std::max(worst_grad, max_rel_err(numeric_gradient(
                                                      [&](const VectorXd& t) {
                                                        auto c = vf;
                                                        nn::assign_flat(c.net, t);
                                                        return (c.values(Sv) - y).squaredNorm();
                                                      },
                                                      nn::flatten(vf.net)),
                                                  policy::value_loss_grad(vf, Sv, y)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.pass = worst_kl < 0.01 && worst_loss <= 1e-12 && worst_grad <= 1e-4 && secs < 120.0;
  o.detail = "kl_rel_err=" + fmt(worst_kl) + " loss_err=" + fmt(worst_loss) + " grad_rel_err=" + fmt(worst_grad) +
             " runtime_s=" + fmt(secs);
  return o;
}

// -------------------------------------------------------- criteria 2 to 8

Outcome trust_region(RunCache& cache, int seeds) {
  const auto c = cli::preset("mountaincar-homogeneous");
  const double bound = 1.5 * c.teacher.trpo.kl_limit;
  int accepted = 0, violations = 0;
  double worst = 0.0;
  for (auto mode : {train::Mode::Full, train::Mode::SurpriseMaxBaseline, train::Mode::Plain}) {
    for (int s = 0; s < seeds; ++s) {
      for (const auto& m : cache.get(c, mode, static_cast<std::uint64_t>(s))) {
        if (!m.trpo_accepted) continue;
        ++accepted;
        worst = std::max(worst, m.trpo_kl);
        if (!(m.trpo_kl <= bound)) ++violations;
      }
    }
  }
  return {accepted > 0 && violations == 0, "accepted=" + std::to_string(accepted) + " violations=" +
                                               std::to_string(violations) + " max_kl=" + fmt(worst) +
                                               " bound=" + fmt(bound)};
}

Outcome exploration(RunCache& cache) {
  const auto c = cli::preset("mountaincar-homogeneous");
  const auto base = cache.seeds(c, train::Mode::SurpriseMaxBaseline);
  const auto plain = cache.seeds(c, train::Mode::Plain);
  int base_ok = 0, plain_zero = 0;
  std::string b, p;
  for (const auto& r : base) base_ok += r.teacher_tail > 0.5, b += fmt(r.teacher_tail) + " ";
  for (const auto& r : plain) plain_zero += r.teacher_tail == 0.0, p += fmt(r.teacher_tail) + " ";
  return {base_ok >= 3 && plain_zero >= 4, "baseline_goal_rate=[" + b + "] plain_goal_rate=[" + p +
                                               "] epochs=" + std::to_string(base.empty() ? 0 : c.epochs)};
}

Outcome homogeneous_parity(RunCache& cache) {
  const auto c = cli::preset("mountaincar-homogeneous");
  const auto runs = cache.seeds(c, train::Mode::Full);
  const double t = mean_of(runs, &train::RunSummary::teacher_tail);
  const double s = mean_of(runs, &train::RunSummary::student_tail);
  std::string detail = "teacher=" + fmt(t) + " student=" + fmt(s);
  if (t == 0.0) detail += " (degenerate: Teacher never reached the goal)";
  return {s >= 0.7 * t, detail};
}

Outcome heterogeneous(RunCache& cache) {
  bool pass = true;
  std::string detail;
  for (const char* name : {"cartpole-hetero-xlimit", "cartpole-hetero-polemass"}) {
    const auto c = cli::preset(name);
    const auto full = cache.seeds(c, train::Mode::Full);
    const auto base = cache.seeds(c, train::Mode::SurpriseMaxBaseline);
    const double sf = mean_of(full, &train::RunSummary::student_tail);
    const double sb = mean_of(base, &train::RunSummary::student_tail);
    const double tf = mean_of(full, &train::RunSummary::teacher_tail);
    const double tb = mean_of(base, &train::RunSummary::teacher_tail);
    const double scale = std::max(std::abs(tf), std::abs(tb));
    const double teacher_diff = scale > 0.0 ? std::abs(tf - tb) / scale : 0.0;
    // All-zero returns satisfy the inequality without showing anything, so they count as a failure.
    const bool degenerate = sf == 0.0 && sb == 0.0 && tf == 0.0 && tb == 0.0;
    pass = pass && !degenerate && sf >= sb && teacher_diff < 0.2;
    detail += std::string(name) + ": student full=" + fmt(sf) + " baseline=" + fmt(sb) + " teacher full=" + fmt(tf) +
              " baseline=" + fmt(tb) + " rel_diff=" + fmt(teacher_diff) + (degenerate ? " (no reward in any run)" : "") +
              "; ";
  }
  return {pass, detail};
}

Outcome weight_sweep(RunCache& cache) {
  const auto low = cli::preset("cartpole-hetero-xlimit");
  const auto high = cli::preset("cartpole-sweep-etaS");
  const double base = mean_of(cache.seeds(low, train::Mode::SurpriseMaxBaseline), &train::RunSummary::student_tail);
  const double gap_low = mean_of(cache.seeds(low, train::Mode::Full), &train::RunSummary::student_tail) - base;
  const double gap_high = mean_of(cache.seeds(high, train::Mode::Full), &train::RunSummary::student_tail) - base;
  const double full_high = gap_high + base;
  const bool degenerate = base == 0.0 && gap_low == 0.0 && full_high == 0.0;
  std::string detail = degenerate ? "(no Student reward in any run) " : "";
  detail += "gap(eta0_S=" + fmt(low.weights.eta0_S) + ")=" + fmt(gap_low) + " gap(eta0_S=" + fmt(high.weights.eta0_S) +
            ")=" + fmt(gap_high) + " student baseline=" + fmt(base) + " full(low)=" + fmt(gap_low + base) +
            " full(high)=" + fmt(full_high);
  return {!degenerate && gap_high >= gap_low, detail};
}

Outcome determinism(const fs::path& scratch) {
  auto c = cli::preset("mountaincar-hetero-power");
  c.epochs = 4;
  c.steps_per_epoch = 1000;
  c.checkpoint_every = 1;
  fs::remove_all(scratch);
  train::ExperimentOptions a, b, r;
  a.out_dir = scratch / "a";
  b.out_dir = scratch / "b";
  r.out_dir = scratch / "resumed";
  train::run_experiment(c, a);
  train::run_experiment(c, b);
  const std::string ma = slurp(a.out_dir / "metrics.csv");
  const bool same = ma == slurp(b.out_dir / "metrics.csv") && slurp(a.out_dir / "demos.csv") == slurp(b.out_dir / "demos.csv");
  // Resume a copy of run a after epoch 1; the rewritten log must match byte for byte.
  fs::copy(a.out_dir, r.out_dir, fs::copy_options::recursive);
  r.resume_from = train::state_checkpoint_path(a.out_dir, 1);
  train::run_experiment(c, r);
  const bool resumed = slurp(r.out_dir / "metrics.csv") == ma;
  fs::remove_all(scratch);
  return {same && resumed, std::string("rerun_identical=") + (same ? "yes" : "no") +
                               " resume_identical=" + (resumed ? "yes" : "no")};
}

Outcome demonstration_force(RunCache& cache) {
  const auto c = cli::preset("mountaincar-hetero-power-textintent");
  const double full = mean_of(cache.seeds(c, train::Mode::Full), &train::RunSummary::demo_force_tail);
  const double base = mean_of(cache.seeds(c, train::Mode::SurpriseMaxBaseline), &train::RunSummary::demo_force_tail);
  return {full > base, "student_power=" + fmt(c.student_env.power) + " teacher_power=" + fmt(c.teacher_env.power) +
                           " demo_force full=" + fmt(full) + " baseline=" + fmt(base)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steach acceptance checks"};
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8};
  Options opt;
  std::string runs = "acceptance_runs";
  app.add_option("--criteria", criteria, "Criteria to check")->delimiter(',')->check(CLI::Range(1, 8));
  app.add_option("--runs", runs, "Directory caching the training runs")->capture_default_str();
  app.add_option("--seeds", opt.seeds, "Seeds per configuration")->capture_default_str();
  app.add_option("--epochs", opt.epochs, "Override preset epochs (0 keeps them)");
  app.add_flag("--verbose", opt.verbose, "Report each training run");
  CLI11_PARSE(app, argc, argv);
  opt.runs_dir = runs;

  RunCache cache(opt);
  bool all = true;
  for (int k : criteria) {
    Outcome o;
    try {
      switch (k) {
        case 1: o = math_oracles(); break;
        case 2: o = trust_region(cache, opt.seeds); break;
        case 3: o = exploration(cache); break;
        case 4: o = homogeneous_parity(cache); break;
        case 5: o = heterogeneous(cache); break;
        case 6: o = weight_sweep(cache); break;
        case 7: o = determinism(opt.runs_dir / "determinism"); break;
        case 8: o = demonstration_force(cache); break;
      }
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
