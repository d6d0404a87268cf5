#include "steach/train/checkpoint.hpp"

#include <fstream>

#include "steach/cli/config_file.hpp"
#include "steach/common/binary_io.hpp"
#include "steach/common/error.hpp"
#include "steach/dynamics/checkpoint.hpp"
#include "steach/nn/serialize.hpp"

namespace steach::train {

namespace {

void write_policy(io::BinaryWriter& w, const policy::GaussianPolicy& p) {
  w.tag("STDPOLI1");
  w.str(std::string(envs::to_string(p.feature_map)));
  w.vec(p.action_low);
  w.vec(p.action_high);
  w.vec(p.log_std);
  nn::write_mlp(w, p.mean_net);
}

policy::GaussianPolicy read_policy(io::BinaryReader& r) {
  r.expect_tag("STDPOLI1");
  policy::GaussianPolicy p;
  p.feature_map = envs::parse_feature_map(r.str());
  p.action_low = r.vec();
  p.action_high = r.vec();
  p.log_std = r.vec();
  p.mean_net = nn::read_mlp(r);
  if (p.action_low.size() != p.log_std.size() || p.action_high.size() != p.log_std.size() ||
      p.mean_net.output_dim() != p.log_std.size()) {
    throw IoError("policy checkpoint: inconsistent dimensions");
  }
  return p;
}

std::ofstream open_write(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  return f;
}

std::ifstream open_read(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return f;
}

void finish_write(std::ofstream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

void save_policy(const std::filesystem::path& path, const policy::GaussianPolicy& policy) {
  auto f = open_write(path);
  io::BinaryWriter w(f);
  write_policy(w, policy);
  finish_write(f, path);
}

policy::GaussianPolicy load_policy(const std::filesystem::path& path) {
  auto f = open_read(path);
  io::BinaryReader r(f);
  try {
    return read_policy(r);
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_state(const std::filesystem::path& path, const TrainingState& s) {
  auto f = open_write(path);
  io::BinaryWriter w(f);
  w.tag("STDSTAT1");
  w.str(cli::serialize_config(s.config));
  w.i64(s.epoch);
  write_policy(w, s.teacher_policy);
  w.str(std::string(envs::to_string(s.value_fn.feature_map)));
  nn::write_mlp(w, s.value_fn.net);
  write_policy(w, s.student_policy);
  dynamics::write_model(f, s.teacher_model);
  dynamics::write_model(f, s.student_model);
  dynamics::write_buffer(f, s.teacher_buffer);
  dynamics::write_buffer(f, s.student_buffer);
  for (const auto* opt : {&s.teacher_model_opt, &s.student_model_opt, &s.value_opt, &s.bc_opt})
    nn::write_optimizer(w, *opt);
  for (const Rng* g : {&s.rng.teacher_model_fit, &s.rng.teacher_rollout, &s.rng.value_fit, &s.rng.demo, &s.rng.bc,
                       &s.rng.student_rollout, &s.rng.student_model_fit, &s.rng.eval})
    w.str(g->serialize());
  w.vec(Eigen::Map<const Eigen::VectorXd>(s.student_rewards.data(),
                                          static_cast<Eigen::Index>(s.student_rewards.size())));
  finish_write(f, path);
}

TrainingState load_state(const std::filesystem::path& path) {
  auto f = open_read(path);
  io::BinaryReader r(f);
  try {
    r.expect_tag("STDSTAT1");
    TrainingState s(cli::parse_config(r.str()));
    s.epoch = static_cast<int>(r.i64());
    s.teacher_policy = read_policy(r);
    s.value_fn.feature_map = envs::parse_feature_map(r.str());
    s.value_fn.net = nn::read_mlp(r);
    s.student_policy = read_policy(r);
    s.teacher_model = dynamics::read_model(f);
    s.student_model = dynamics::read_model(f);
    s.teacher_buffer = dynamics::read_buffer(f);
    s.student_buffer = dynamics::read_buffer(f);
    for (auto* opt : {&s.teacher_model_opt, &s.student_model_opt, &s.value_opt, &s.bc_opt})
      *opt = nn::read_optimizer(r);
    for (Rng* g : {&s.rng.teacher_model_fit, &s.rng.teacher_rollout, &s.rng.value_fit, &s.rng.demo, &s.rng.bc,
                   &s.rng.student_rollout, &s.rng.student_model_fit, &s.rng.eval})
      *g = Rng::deserialize(r.str());
    const Eigen::VectorXd rewards = r.vec();
    s.student_rewards.assign(rewards.data(), rewards.data() + rewards.size());
    if (s.teacher_model.owner != dynamics::Owner::Teacher || s.student_model.owner != dynamics::Owner::Student ||
        s.teacher_buffer.owner() != dynamics::Owner::Teacher || s.student_buffer.owner() != dynamics::Owner::Student) {
      throw IoError("owner tags do not match their slots");
    }
    return s;
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace steach::train
