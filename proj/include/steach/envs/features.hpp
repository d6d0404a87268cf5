#pragma once

#include <Eigen/Core>

#include <string_view>

namespace steach::envs {

/// Fixed observation maps fed to policy and value networks.
///
/// MountainCar scales velocity by its bound; CartPole replaces the angle by
/// (cos, sin) and scales rates. The scales are constants, not heterogeneity
/// parameters, so Teacher and Student see one coordinate system.
enum class FeatureMap { Identity, MountainCar, CartPole };

std::string_view to_string(FeatureMap map);
FeatureMap parse_feature_map(std::string_view text);

int feature_dim(FeatureMap map, int state_dim);
Eigen::VectorXd features(FeatureMap map, const Eigen::VectorXd& state);
/// Column-wise features for a batch of states.
Eigen::MatrixXd features_batch(FeatureMap map, const Eigen::MatrixXd& states);

}  // namespace steach::envs
