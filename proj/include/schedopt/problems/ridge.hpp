#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "schedopt/quadratic/reduction.hpp"
#include "schedopt/rng.hpp"

namespace schedopt {

/// Ridge regression family
///   f(z, x) = (1/2) ||A z - x||^2 + lambda ||z||^2,
/// with A fixed (i.i.d. N(0, 1/m) entries, columns normalized to unit norm)
/// and the right-hand side as the parameter, x ~ N(0, I_m). The Gram matrix
/// G = A'A + 2 lambda I drives the closed-form solution and the constants.
class RidgeFamily {
 public:
  static RidgeFamily generate(int m, int n, double lambda_reg,
                              std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("ridge needs m, n >= 1");
    if (lambda_reg <= 0.0) throw std::invalid_argument("ridge needs lambda > 0");
    Rng rng(derive_seed(seed, 0, 0));
    Eigen::MatrixXd A = rng.normal_matrix(m, n) / std::sqrt(static_cast<double>(m));
    for (int j = 0; j < n; ++j) A.col(j) /= A.col(j).norm();
    return RidgeFamily(std::move(A), lambda_reg, seed);
  }

  int dim() const { return static_cast<int>(A_.cols()); }
  int parameter_dim() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& design() const { return A_; }
  const Eigen::MatrixXd& gram() const { return G_; }
  double regularizer() const { return lambda_; }
  double smoothness() const { return L_; }
  double strong_convexity() const { return mu_; }

  double objective(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    return 0.5 * (A_ * z - x).squaredNorm() + lambda_ * z.squaredNorm();
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    return G_ * z - A_.transpose() * x;
  }
  Eigen::VectorXd hess_vec(const Eigen::VectorXd&, const Eigen::VectorXd&,
                           const Eigen::VectorXd& u) const {
    return G_ * u;
  }

  /// Closed-form minimizer G^{-1} A' x.
  Eigen::VectorXd solve(const Eigen::VectorXd& x) const {
    return llt_.solve(A_.transpose() * x);
  }

  struct LinearSystem {
    const Eigen::MatrixXd& matrix;
    Eigen::VectorXd rhs;
  };
  LinearSystem linear_system(const Eigen::VectorXd& x) const {
    return {G_, A_.transpose() * x};
  }

  Eigen::VectorXd parameter(std::uint64_t stream, int index) const {
    Rng rng(derive_seed(seed_, stream, static_cast<std::uint64_t>(index)));
    return rng.normal_vector(parameter_dim());
  }

  /// Distribution of the linear term of the equivalent canonical quadratic
  /// (1/2) z'Gz + c'z: c = -A'x, so c ~ N(0, A'A) for x ~ N(0, I).
  GaussianParameterModel quadratic_parameter_model() const {
    return {Eigen::VectorXd::Zero(dim()), A_.transpose() * A_};
  }

 private:
  RidgeFamily(Eigen::MatrixXd A, double lambda_reg, std::uint64_t seed)
      : A_(std::move(A)), lambda_(lambda_reg), seed_(seed) {
    G_ = A_.transpose() * A_;
    G_.diagonal().array() += 2.0 * lambda_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G_);
    mu_ = eig.eigenvalues().minCoeff();
    L_ = eig.eigenvalues().maxCoeff();
    llt_.compute(G_);
  }

  Eigen::MatrixXd A_;
  Eigen::MatrixXd G_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double lambda_ = 0.0;
  double mu_ = 0.0;
  double L_ = 0.0;
  std::uint64_t seed_ = 0;
};

}  // namespace schedopt
