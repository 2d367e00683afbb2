#pragma once

#include <Eigen/Core>

#include "schedopt/operators.hpp"
#include "schedopt/train/reparam.hpp"

namespace schedopt {

/// Componentwise shrinkage sign(v) * max(0, |v| - psi).
inline Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double psi) {
  return v.array().sign() * (v.array().abs() - psi).max(0.0);
}

/// Proximal-gradient fixed-point operator. The family supplies the smooth
/// part via gradient(z, x) / hess_vec, its prox scaled by the step
/// (prox(v, theta)), and prox_vjp for reverse mode.
template <class Family>
class ProximalGradient {
 public:
  explicit ProximalGradient(const Family& family) : family_(&family) {}

  int dim() const { return family_->dim(); }
  int arity() const { return 1; }

  Eigen::VectorXd step(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& theta) const {
    return family_->prox(z - theta[0] * family_->gradient(z, x), theta[0]);
  }

  StepVjp step_vjp(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& grad_out) const {
    const Eigen::VectorXd g = family_->gradient(z, x);
    const Eigen::VectorXd v = z - theta[0] * g;
    const auto pv = family_->prox_vjp(v, theta[0], grad_out);
    StepVjp r;
    r.grad_state = pv.grad_input - theta[0] * family_->hess_vec(z, x, pv.grad_input);
    r.grad_theta =
        Eigen::VectorXd::Constant(1, pv.grad_step - pv.grad_input.dot(g));
    return r;
  }

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
