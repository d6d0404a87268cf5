#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "steach/common/error.hpp"
#include "steach/common/rng.hpp"
#include "steach/envs/env.hpp"
#include "steach/policy/rollout.hpp"
#include "steach/student/student.hpp"

using namespace steach;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using policy::GaussianPolicy;

namespace {

GaussianPolicy mc_policy(std::uint64_t seed) {
  return GaussianPolicy::create(2, 1, {32, 32}, envs::FeatureMap::MountainCar, VectorXd::Constant(1, -1),
                                VectorXd::Constant(1, 1), 0.0, seed);
}

MatrixXd mc_states(int n, Rng& rng) {
  MatrixXd s(2, n);
  for (int i = 0; i < n; ++i) s.col(i) << rng.uniform(-1.2, 0.6), rng.uniform(-0.07, 0.07);
  return s;
}

}  // namespace

TEST_CASE("behavior cloning recovers a linear mapping") {
  Rng rng(1);
  student::DemonstrationSet d;
  d.states = mc_states(500, rng);
  d.actions = 0.5 * d.states.row(0);
  auto p = mc_policy(2);
  nn::OptimizerState opt;
  student::BcOptions o;
  o.epochs = 200;
  student::behavior_clone(p, d, o, opt, rng);
  const MatrixXd held = mc_states(200, rng);
  double err = 0.0;
  for (int i = 0; i < 200; ++i) err += std::abs(policy::mean_action(p, held.col(i))(0) - 0.5 * held(0, i));
  CHECK(err / 200 < 0.05);
}

TEST_CASE("behavior cloning: zero epochs, empty demos") {
  Rng rng(2);
  student::DemonstrationSet d;
  d.states = mc_states(10, rng);
  d.actions = MatrixXd::Zero(1, 10);
  auto p = mc_policy(3);
  const auto before = p;
  nn::OptimizerState opt;
  student::BcOptions o;
  o.epochs = 0;
  student::behavior_clone(p, d, o, opt, rng);
  CHECK(p == before);
  CHECK_THROWS_AS(student::behavior_clone(p, student::DemonstrationSet{}, o, opt, rng), UsageError);
}

TEST_CASE("cloning a policy onto its own samples does not lower the likelihood") {
  Rng rng(4);
  auto p = mc_policy(5);
  student::DemonstrationSet d;
  d.states = mc_states(400, rng);
  d.actions.resize(1, 400);
  for (int i = 0; i < 400; ++i) d.actions.col(i) = policy::act(p, d.states.col(i), rng).action;
  const double before = student::bc_loss(p, d);
  nn::OptimizerState opt;
  student::behavior_clone(p, d, {}, opt, rng);
  CHECK(student::bc_loss(p, d) <= before);
}

TEST_CASE("BC loss is non-increasing over seeded cloning runs") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    student::DemonstrationSet d;
    d.states = mc_states(300, rng);
    d.actions = (3.0 * d.states.row(0)).array().tanh();
    auto p = mc_policy(seed + 50);
    nn::OptimizerState opt;
    student::BcOptions o;
    o.epochs = 10;
    const auto r = student::behavior_clone(p, d, o, opt, rng);
    bool mono = r.loss_before >= r.epoch_losses.front();
    for (std::size_t i = 1; i < r.epoch_losses.size(); ++i) mono = mono && r.epoch_losses[i] <= r.epoch_losses[i - 1];
    if (mono) ++ok;
  }
  CHECK(ok >= 18);
}

TEST_CASE("evaluate: zero-force policy, single episode, determinism") {
  auto p = mc_policy(6);
  for (auto& w : p.mean_net.weights) w.setZero();
  const auto env = envs::EnvParams::mountain_car();
  Rng rng(1);
  const auto r = student::evaluate(p, env, 5, rng);
  CHECK(r.mean_return == 0.0);
  CHECK(r.per_episode.size() == 5);

  const auto q = mc_policy(7);
  Rng a(3), b(3);
  const auto one = student::evaluate(q, env, 1, a);
  CHECK(one.std_return == 0.0);
  Rng c(3);
  const auto ra = student::evaluate(q, env, 3, b);
  const auto rb = student::evaluate(q, env, 3, c);
  CHECK(ra.per_episode == rb.per_episode);
  CHECK(ra.mean_return == rb.mean_return);
}

TEST_CASE("demonstrations from trajectories and the dump format") {
  Rng rng(8);
  const auto env = envs::EnvParams::mountain_car();
  const auto trajs = policy::collect_rollouts(env, mc_policy(9), 30, rng);
  auto d = student::make_demonstrations(trajs, 4);
  CHECK(d.size() == 30);
  CHECK(d.epoch == 4);
  CHECK(d.actions.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(d.step_index.front() == 0);
  std::ostringstream out;
  out << student::demo_csv_header(2) << '\n';
  student::append_demo_csv(out, d);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,t,s0,s1,action,teacher_surprise,student_surprise");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
    CHECK(line.rfind("4,", 0) == 0);
  }
  CHECK(rows == 30);
}
