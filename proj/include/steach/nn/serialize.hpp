#pragma once

#include "steach/common/binary_io.hpp"
#include "steach/nn/adam.hpp"
#include "steach/nn/mlp.hpp"

namespace steach::nn {

// Layer sizes (u64 count, then each as u64) followed by the flat parameter vector.
void write_mlp(io::BinaryWriter& w, const MlpParams& params);
MlpParams read_mlp(io::BinaryReader& r);

void write_optimizer(io::BinaryWriter& w, const OptimizerState& state);
OptimizerState read_optimizer(io::BinaryReader& r);

}  // namespace steach::nn
