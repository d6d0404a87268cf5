#include "steach/envs/features.hpp"

#include <cmath>
#include <string>

#include "steach/common/error.hpp"
#include "steach/envs/env.hpp"

namespace steach::envs {

namespace {
constexpr double kCartPositionScale = 2.4;
constexpr double kCartVelocityScale = 5.0;
constexpr double kPoleRateScale = 10.0;
}  // namespace

std::string_view to_string(FeatureMap map) {
  switch (map) {
    case FeatureMap::Identity: return "identity";
    case FeatureMap::MountainCar: return "mountain_car";
    case FeatureMap::CartPole: return "cartpole";
  }
  return "unknown";
}

FeatureMap parse_feature_map(std::string_view text) {
  if (text == "identity") return FeatureMap::Identity;
  if (text == "mountain_car") return FeatureMap::MountainCar;
  if (text == "cartpole") return FeatureMap::CartPole;
  throw ConfigError("unknown feature map '" + std::string(text) + "'");
}

int feature_dim(FeatureMap map, int state_dim) {
  switch (map) {
    case FeatureMap::Identity: return state_dim;
    case FeatureMap::MountainCar: return 2;
    case FeatureMap::CartPole: return 5;
  }
  return state_dim;
}

Eigen::MatrixXd features_batch(FeatureMap map, const Eigen::MatrixXd& s) {
  switch (map) {
    case FeatureMap::Identity: return s;
    case FeatureMap::MountainCar: {
      if (s.rows() != 2) throw ShapeError("mountain car features need 2-d states");
      Eigen::MatrixXd f(2, s.cols());
      f.row(0) = s.row(0);
      f.row(1) = s.row(1) / kMountainCarMaxSpeed;
      return f;
    }
    case FeatureMap::CartPole: {
      if (s.rows() != 4) throw ShapeError("cart-pole features need 4-d states");
      Eigen::MatrixXd f(5, s.cols());
      f.row(0) = s.row(0) / kCartPositionScale;
      f.row(1) = s.row(1) / kCartVelocityScale;
      f.row(2) = s.row(2).array().cos().matrix();
      f.row(3) = s.row(2).array().sin().matrix();
      f.row(4) = s.row(3) / kPoleRateScale;
      return f;
    }
  }
  return s;
}

Eigen::VectorXd features(FeatureMap map, const Eigen::VectorXd& state) {
  return features_batch(map, Eigen::MatrixXd(state)).col(0);
}

}  // namespace steach::envs
