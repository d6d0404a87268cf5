#include "steach/dynamics/buffer.hpp"

#include "steach/common/error.hpp"

namespace steach::dynamics {

TransitionBuffer::TransitionBuffer(int state_dim, int action_dim, std::size_t capacity, Owner owner)
    : state_dim_(state_dim), action_dim_(action_dim), capacity_(capacity), owner_(owner) {
  if (state_dim <= 0 || action_dim <= 0) throw ConfigError("transition buffer: dimensions must be positive");
  if (capacity == 0) throw ConfigError("transition buffer: capacity must be positive");
  const auto cap = static_cast<Eigen::Index>(capacity);
  states_.resize(state_dim, cap);
  actions_.resize(action_dim, cap);
  next_states_.resize(state_dim, cap);
}

void TransitionBuffer::push(const Eigen::VectorXd& s, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& s_next) {
  if (s.size() != state_dim_ || s_next.size() != state_dim_ || a.size() != action_dim_) {
    throw ShapeError("transition buffer: transition dimensions do not match buffer");
  }
  const auto col = static_cast<Eigen::Index>(head_);
  states_.col(col) = s;
  actions_.col(col) = a;
  next_states_.col(col) = s_next;
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

void TransitionBuffer::gather(const std::vector<std::size_t>& indices, Eigen::MatrixXd& s,
                              Eigen::MatrixXd& a, Eigen::MatrixXd& s_next) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  s.resize(state_dim_, n);
  a.resize(action_dim_, n);
  s_next.resize(state_dim_, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto i = indices[static_cast<std::size_t>(j)];
    if (i >= size_) throw UsageError("transition buffer: index out of range");
    const auto c = static_cast<Eigen::Index>(slot(i));
    s.col(j) = states_.col(c);
    a.col(j) = actions_.col(c);
    s_next.col(j) = next_states_.col(c);
  }
}

bool operator==(const TransitionBuffer& a, const TransitionBuffer& b) {
  if (a.state_dim_ != b.state_dim_ || a.action_dim_ != b.action_dim_ || a.capacity_ != b.capacity_ ||
      a.owner_ != b.owner_ || a.size_ != b.size_) {
    return false;
  }
  for (std::size_t i = 0; i < a.size_; ++i) {
    const auto ca = static_cast<Eigen::Index>(a.slot(i));
    const auto cb = static_cast<Eigen::Index>(b.slot(i));
    if (a.states_.col(ca) != b.states_.col(cb) || a.actions_.col(ca) != b.actions_.col(cb) ||
        a.next_states_.col(ca) != b.next_states_.col(cb)) {
      return false;
    }
  }
  return true;
}

}  // namespace steach::dynamics
