#include "steach/dynamics/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "steach/common/error.hpp"

namespace steach::dynamics {

double negative_log_density(const DiagonalGaussian& dist, const Eigen::VectorXd& x) {
  if (x.size() != dist.mean.size() || dist.variance.size() != dist.mean.size()) {
    throw ShapeError("negative_log_density: dimension mismatch");
  }
  if (!x.allFinite() || !dist.mean.allFinite() || !dist.variance.allFinite() ||
      (dist.variance.array() <= 0.0).any()) {
    throw NumericError("negative_log_density: non-finite input or non-positive variance");
  }
  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  double total = 0.0;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const double r = x[d] - dist.mean[d];
    total += r * r / dist.variance[d] + std::log(dist.variance[d]) + log_two_pi;
  }
  return 0.5 * total;
}

double kl_divergence(const DiagonalGaussian& p, const DiagonalGaussian& q) {
  if (p.mean.size() != q.mean.size() || p.variance.size() != p.mean.size() ||
      q.variance.size() != q.mean.size()) {
    throw ShapeError("kl_divergence: dimension mismatch");
  }
  double total = 0.0;
  for (Eigen::Index d = 0; d < p.mean.size(); ++d) {
    const double dm = p.mean[d] - q.mean[d];
    total += 0.5 * std::log(q.variance[d] / p.variance[d]) +
             (p.variance[d] + dm * dm) / (2.0 * q.variance[d]) - 0.5;
  }
  return total;
}

}  // namespace steach::dynamics
