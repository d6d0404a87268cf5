#include "steach/nn/serialize.hpp"

#include "steach/common/error.hpp"

namespace steach::nn {

void write_mlp(io::BinaryWriter& w, const MlpParams& params) {
  const auto sizes = params.layer_sizes();
  w.u64(sizes.size());
  for (int s : sizes) w.u64(static_cast<std::uint64_t>(s));
  w.vec(flatten(params));
}

MlpParams read_mlp(io::BinaryReader& r) {
  const auto n = r.u64();
  if (n < 2 || n > 64) throw IoError("network record has implausible layer count");
  std::vector<int> sizes;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto s = r.u64();
    if (s == 0 || s > (1u << 20)) throw IoError("network record has implausible layer size");
    sizes.push_back(static_cast<int>(s));
  }
  MlpParams params = init_params(sizes, 0);
  const Eigen::VectorXd flat = r.vec();
  if (flat.size() != params.parameter_count()) throw IoError("network record parameter count mismatch");
  assign_flat(params, flat);
  return params;
}

void write_optimizer(io::BinaryWriter& w, const OptimizerState& state) {
  w.u64(state.step_count);
  w.vec(state.first_moment);
  w.vec(state.second_moment);
}

OptimizerState read_optimizer(io::BinaryReader& r) {
  OptimizerState s;
  s.step_count = r.u64();
  s.first_moment = r.vec();
  s.second_moment = r.vec();
  if (s.first_moment.size() != s.second_moment.size()) throw IoError("optimizer record moment size mismatch");
  return s;
}

}  // namespace steach::nn
