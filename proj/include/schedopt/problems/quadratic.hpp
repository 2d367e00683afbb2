#pragma once

#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace schedopt {

/// Canonical strongly convex quadratic f(z, x) = (1/2) z'Pz + x'z with the
/// parameter as the linear term; z*(x) = -P^{-1} x.
class QuadraticFamily {
 public:
  explicit QuadraticFamily(Eigen::MatrixXd P) : P_(std::move(P)) {
    if (P_.rows() != P_.cols() || !P_.isApprox(P_.transpose(), 1e-9))
      throw std::invalid_argument("quadratic family requires symmetric P");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P_);
    mu_ = eig.eigenvalues().minCoeff();
    L_ = eig.eigenvalues().maxCoeff();
    if (mu_ <= 0.0)
      throw std::invalid_argument("quadratic family requires positive definite P");
    llt_.compute(P_);
  }

  int dim() const { return static_cast<int>(P_.rows()); }
  int parameter_dim() const { return dim(); }
  const Eigen::MatrixXd& matrix() const { return P_; }
  double smoothness() const { return L_; }
  double strong_convexity() const { return mu_; }

  double objective(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    return 0.5 * z.dot(P_ * z) + x.dot(z);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    return P_ * z + x;
  }
  Eigen::VectorXd hess_vec(const Eigen::VectorXd&, const Eigen::VectorXd&,
                           const Eigen::VectorXd& u) const {
    return P_ * u;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& x) const { return -llt_.solve(x); }

  struct LinearSystem {
    const Eigen::MatrixXd& matrix;
    Eigen::VectorXd rhs;
  };
  LinearSystem linear_system(const Eigen::VectorXd& x) const {
    return {P_, -x};
  }

 private:
  Eigen::MatrixXd P_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double mu_ = 0.0;
  double L_ = 0.0;
};

}  // namespace schedopt
