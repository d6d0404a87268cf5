#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace steach {

/// Seeded generator with platform-independent sampling routines.
///
/// Only the raw 64-bit engine output is used; uniform and normal draws are
/// derived here so that streams are identical across standard libraries.
/// Normal draws consume two uniforms and never cache, so the full generator
/// state is the engine state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  void shuffle(std::vector<std::size_t>& values);
  /// Independent child stream (consumes one draw from this stream).
  Rng split();

  std::string serialize() const;
  static Rng deserialize(const std::string& text);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 mixing step; used to derive well-separated seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace steach
