#include "steach/policy/trpo.hpp"

namespace steach::policy {

void TrpoConfig::validate() const {
  if (!(kl_limit > 0.0) || !std::isfinite(kl_limit)) throw ConfigError("trpo: kl_limit must be > 0");
  if (cg_iters < 1) throw ConfigError("trpo: cg_iters must be >= 1");
  if (!(backtrack_coeff > 0.0 && backtrack_coeff < 1.0)) throw ConfigError("trpo: backtrack_coeff must lie in (0, 1)");
  if (backtrack_iters < 1) throw ConfigError("trpo: backtrack_iters must be >= 1");
  if (!(damping >= 0.0) || !std::isfinite(damping)) throw ConfigError("trpo: damping must be >= 0");
  if (!(kl_accept_factor >= 1.0)) throw ConfigError("trpo: kl_accept_factor must be >= 1");
}

std::string TrpoStats::dump() const {
  std::ostringstream os;
  os << "accepted=" << accepted << " kl=" << kl << " surrogate_before=" << surrogate_before
     << " surrogate_after=" << surrogate_after << " expected_improvement=" << expected_improvement
     << " grad_norm=" << grad_norm << " line_search_steps=" << line_search_steps;
  return os.str();
}

Eigen::VectorXd conjugate_gradient(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                                   const Eigen::VectorXd& b, int iters, double residual_tol) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = b;
  double rr = r.squaredNorm();
  for (int i = 0; i < iters && rr > residual_tol; ++i) {
    const Eigen::VectorXd Ap = apply(p);
    const double alpha = rr / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return x;
}

}  // namespace steach::policy
