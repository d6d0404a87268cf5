#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "steach/dynamics/owner.hpp"

namespace steach::dynamics {

/// Fixed-capacity FIFO store of (s, a, s') transitions tagged with the agent
/// whose environment produced them.
class TransitionBuffer {
 public:
  TransitionBuffer(int state_dim, int action_dim, std::size_t capacity, Owner owner);

  void push(const Eigen::VectorXd& s, const Eigen::VectorXd& a, const Eigen::VectorXd& s_next);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }
  Owner owner() const { return owner_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }

  // Logical index 0 is the oldest stored transition.
  Eigen::VectorXd state(std::size_t i) const { return states_.col(slot(i)); }
  Eigen::VectorXd action(std::size_t i) const { return actions_.col(slot(i)); }
  Eigen::VectorXd next_state(std::size_t i) const { return next_states_.col(slot(i)); }

  /// Gathers the given logical indices into column matrices.
  void gather(const std::vector<std::size_t>& indices, Eigen::MatrixXd& s, Eigen::MatrixXd& a,
              Eigen::MatrixXd& s_next) const;

  friend bool operator==(const TransitionBuffer& a, const TransitionBuffer& b);

 private:
  std::size_t slot(std::size_t i) const { return (head_ + capacity_ - size_ + i) % capacity_; }

  int state_dim_;
  int action_dim_;
  std::size_t capacity_;
  Owner owner_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;  // next write position
  Eigen::MatrixXd states_;
  Eigen::MatrixXd actions_;
  Eigen::MatrixXd next_states_;
};

}  // namespace steach::dynamics
