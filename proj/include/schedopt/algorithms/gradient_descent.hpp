#pragma once

#include <Eigen/Core>

#include "schedopt/operators.hpp"
#include "schedopt/train/reparam.hpp"

namespace schedopt {

/// One gradient step z - theta * grad(z, x) with an arbitrary gradient oracle.
template <class GradFn>
Eigen::VectorXd gd_step(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                        double theta, GradFn&& grad) {
  return z - theta * grad(z, x);
}

/// Gradient-descent fixed-point operator on a smooth family. The family
/// supplies gradient(z, x), hess_vec(z, x, u) and smoothness().
template <class Family>
class GradientDescent {
 public:
  explicit GradientDescent(const Family& family) : family_(&family) {}

  int dim() const { return family_->dim(); }
  int arity() const { return 1; }

  Eigen::VectorXd step(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& theta) const {
    return z - theta[0] * family_->gradient(z, x);
  }

  StepVjp step_vjp(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& grad_out) const {
    StepVjp r;
    r.grad_state = grad_out - theta[0] * family_->hess_vec(z, x, grad_out);
    r.grad_theta = Eigen::VectorXd::Constant(1, -grad_out.dot(family_->gradient(z, x)));
    return r;
  }

  /// Convergence requires 0 < theta < 2 / L in the steady-state phase.
  ValidityReport check_steady_state(const Eigen::VectorXd& theta) const {
    const double limit = 2.0 / family_->smoothness();
    ValidityReport rep;
    rep.checks.push_back({"step > 0", theta[0] > 0.0, theta[0]});
    rep.checks.push_back({"step < 2/L", theta[0] < limit, theta[0]});
    rep.ok = rep.checks[0].ok && rep.checks[1].ok;
    return rep;
  }

  Eigen::VectorXd fallback_params() const {
    return Eigen::VectorXd::Constant(1, 1.0 / family_->smoothness());
  }

  std::vector<ReparamSpec> step_reparams() const {
    return {ReparamSpec::positive()};
  }
  std::vector<ReparamSpec> steady_reparams() const {
    return {ReparamSpec::range(0.0, 2.0 / family_->smoothness())};
  }

  Eigen::VectorXd loss_mask() const { return Eigen::VectorXd::Ones(dim()); }

  const Family& family() const { return *family_; }

 private:
  const Family* family_;
};

}  // namespace schedopt
