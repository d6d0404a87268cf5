#include "steach/dynamics/checkpoint.hpp"

#include <fstream>

#include "steach/common/binary_io.hpp"
#include "steach/common/error.hpp"
#include "steach/nn/serialize.hpp"

namespace steach::dynamics {

void write_model(std::ostream& out, const GaussianDynamicsModel& model) {
  io::BinaryWriter w(out);
  w.tag("STDMODL1");
  w.u64(static_cast<std::uint64_t>(model.state_dim));
  w.u64(static_cast<std::uint64_t>(model.action_dim));
  w.str(std::string(to_string(model.owner)));
  w.f64(model.logvar_min);
  w.f64(model.logvar_max);
  const auto sizes = model.trunk.layer_sizes();
  w.u64(sizes.size());
  for (int s : sizes) w.u64(static_cast<std::uint64_t>(s));
  w.vec(model.input_normalizer.mean);
  w.vec(model.input_normalizer.std);
  w.vec(nn::flatten(model.trunk));
}

GaussianDynamicsModel read_model(std::istream& in) {
  io::BinaryReader r(in);
  r.expect_tag("STDMODL1");
  GaussianDynamicsModel m;
  m.state_dim = static_cast<int>(r.u64());
  m.action_dim = static_cast<int>(r.u64());
  const std::string owner = r.str();
  if (owner == "teacher") m.owner = Owner::Teacher;
  else if (owner == "student") m.owner = Owner::Student;
  else throw IoError("model checkpoint: unknown owner tag '" + owner + "'");
  m.logvar_min = r.f64();
  m.logvar_max = r.f64();
  const auto n = r.u64();
  if (n < 2 || n > 64) throw IoError("model checkpoint: implausible layer count");
  std::vector<int> sizes;
  for (std::uint64_t i = 0; i < n; ++i) sizes.push_back(static_cast<int>(r.u64()));
  if (sizes.front() != m.state_dim + m.action_dim || sizes.back() != 2 * m.state_dim) {
    throw IoError("model checkpoint: layer sizes inconsistent with dimensions");
  }
  m.input_normalizer.mean = r.vec();
  m.input_normalizer.std = r.vec();
  if (m.input_normalizer.mean.size() != sizes.front() || m.input_normalizer.std.size() != sizes.front()) {
    throw IoError("model checkpoint: normalizer size mismatch");
  }
  m.trunk = nn::init_params(sizes, 0);
  const Eigen::VectorXd flat = r.vec();
  if (flat.size() != m.trunk.parameter_count()) throw IoError("model checkpoint: parameter count mismatch");
  nn::assign_flat(m.trunk, flat);
  return m;
}

void save_model(const std::filesystem::path& path, const GaussianDynamicsModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_model(out, model);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

GaussianDynamicsModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_model(in);
}

void write_buffer(std::ostream& out, const TransitionBuffer& buffer) {
  io::BinaryWriter w(out);
  w.tag("STDBUFF1");
  w.u64(static_cast<std::uint64_t>(buffer.state_dim()));
  w.u64(static_cast<std::uint64_t>(buffer.action_dim()));
  w.u64(buffer.capacity());
  w.str(std::string(to_string(buffer.owner())));
  w.u64(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    w.vec(buffer.state(i));
    w.vec(buffer.action(i));
    w.vec(buffer.next_state(i));
  }
}

TransitionBuffer read_buffer(std::istream& in) {
  io::BinaryReader r(in);
  r.expect_tag("STDBUFF1");
  const auto sd = static_cast<int>(r.u64());
  const auto ad = static_cast<int>(r.u64());
  const auto cap = r.u64();
  const std::string owner = r.str();
  if (owner != "teacher" && owner != "student") throw IoError("buffer checkpoint: unknown owner tag");
  TransitionBuffer buf(sd, ad, cap, owner == "teacher" ? Owner::Teacher : Owner::Student);
  const auto n = r.u64();
  if (n > cap) throw IoError("buffer checkpoint: size exceeds capacity");
  for (std::uint64_t i = 0; i < n; ++i) {
    const Eigen::VectorXd s = r.vec();
    const Eigen::VectorXd a = r.vec();
    const Eigen::VectorXd s_next = r.vec();
    buf.push(s, a, s_next);
  }
  return buf;
}

}  // namespace steach::dynamics
