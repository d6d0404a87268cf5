#pragma once

#include <Eigen/Core>

namespace steach::dynamics {

/// Diagonal Gaussian over next states; variance is per-dimension.
struct DiagonalGaussian {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;

  Eigen::Index dim() const { return mean.size(); }
};

/// -log N(x; mean, diag(variance)) including the 1/2 and log(2*pi) terms.
double negative_log_density(const DiagonalGaussian& dist, const Eigen::VectorXd& x);

/// Closed-form KL(p || q) for diagonal Gaussians of equal dimension.
double kl_divergence(const DiagonalGaussian& p, const DiagonalGaussian& q);

}  // namespace steach::dynamics
