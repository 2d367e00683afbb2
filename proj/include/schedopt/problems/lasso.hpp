#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "schedopt/operators.hpp"
#include "schedopt/rng.hpp"

namespace schedopt {

/// Lasso family
///   f(z, x) = (1/2) ||A z - x||^2 + lambda ||z||_1,
/// with A fixed (unit-norm columns) and the right-hand side as the parameter.
/// Instances are b = A z_true + noise, where z_true has 90% of its entries
/// zeroed and the noise is rescaled to exactly 40 dB signal-to-noise.
class LassoFamily {
 public:
  static constexpr double kSnrDecibels = 40.0;

  static LassoFamily generate(int m, int n, double lambda_reg,
                              std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("lasso needs m, n >= 1");
    if (lambda_reg <= 0.0) throw std::invalid_argument("lasso needs lambda > 0");
    Rng rng(derive_seed(seed, 0, 0));
    Eigen::MatrixXd A = rng.normal_matrix(m, n) / std::sqrt(static_cast<double>(m));
    for (int j = 0; j < n; ++j) A.col(j) /= A.col(j).norm();
    return LassoFamily(std::move(A), lambda_reg, seed);
  }

  int dim() const { return static_cast<int>(A_.cols()); }
  int parameter_dim() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& design() const { return A_; }
  double regularizer() const { return lambda_; }
  double smoothness() const { return L_; }

  double objective(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    return 0.5 * (A_ * z - x).squaredNorm() + lambda_ * z.lpNorm<1>();
  }

  /// Gradient of the smooth part only.
  Eigen::VectorXd gradient(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    return A_.transpose() * (A_ * z - x);
  }
  Eigen::VectorXd hess_vec(const Eigen::VectorXd&, const Eigen::VectorXd&,
                           const Eigen::VectorXd& u) const {
    return A_.transpose() * (A_ * u);
  }

  Eigen::VectorXd prox(const Eigen::VectorXd& v, double step) const {
    return v.array().sign() * (v.array().abs() - step * lambda_).max(0.0);
  }

  /// Reverse mode of prox; the shrinkage kink takes the zero side.
  ProxVjp prox_vjp(const Eigen::VectorXd& v, double step,
                   const Eigen::VectorXd& grad_out) const {
    ProxVjp r;
    r.grad_input = Eigen::VectorXd::Zero(v.size());
    const double psi = step * lambda_;
    for (int i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > psi) {
        r.grad_input[i] = grad_out[i];
        r.grad_step -= lambda_ * (v[i] > 0.0 ? 1.0 : -1.0) * grad_out[i];
      }
    }
    return r;
  }

  Eigen::VectorXd parameter(std::uint64_t stream, int index) const {
    Rng rng(derive_seed(seed_, stream, static_cast<std::uint64_t>(index)));
    const int n = dim();
    Eigen::VectorXd z_true = rng.normal_vector(n);
    // Zero out exactly floor(0.9 n) entries via a partial Fisher-Yates pass.
    const int zeros = static_cast<int>(std::floor(0.9 * n));
    Eigen::VectorXi idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < zeros; ++i) {
      const int j = rng.uniform_int(i, n - 1);
      std::swap(idx[i], idx[j]);
      z_true[idx[i]] = 0.0;
    }
    const Eigen::VectorXd signal = A_ * z_true;
    Eigen::VectorXd noise = rng.normal_vector(parameter_dim());
    const double target = signal.norm() * std::pow(10.0, -kSnrDecibels / 20.0);
    if (noise.norm() > 0.0 && target > 0.0) noise *= target / noise.norm();
    else noise.setZero();
    return signal + noise;
  }

  /// High-accuracy minimizer via accelerated proximal gradient with adaptive
  /// restart, run until the unit-step fixed-point residual is tiny.
  Eigen::VectorXd solve(const Eigen::VectorXd& x, double tol = 1e-12,
                        int max_iters = 300000) const {
    const double step = 1.0 / L_;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim());
    Eigen::VectorXd y_prev = z;
    double t = 1.0;
    for (int k = 0; k < max_iters; ++k) {
      const Eigen::VectorXd y = prox(z - step * gradient(z, x), step);
      if ((y - z).dot(y - y_prev) < 0.0) {
        t = 1.0;  // adaptive restart
      }
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      z = y + ((t - 1.0) / t_next) * (y - y_prev);
      y_prev = y;
      t = t_next;
      if (k % 16 == 0) {
        const double res = (y - prox(y - step * gradient(y, x), step)).norm();
        if (res <= tol) return y;
      }
    }
    const double res =
        (y_prev - prox(y_prev - step * gradient(y_prev, x), step)).norm();
    if (res > 1e-9)
      throw std::runtime_error("lasso reference solve failed to certify");
    return y_prev;
  }

 private:
  LassoFamily(Eigen::MatrixXd A, double lambda_reg, std::uint64_t seed)
      : A_(std::move(A)), lambda_(lambda_reg), seed_(seed) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A_.transpose() * A_);
    L_ = eig.eigenvalues().maxCoeff();
  }

  Eigen::MatrixXd A_;
  double lambda_ = 0.0;
  double L_ = 0.0;
  std::uint64_t seed_ = 0;
};

}  // namespace schedopt
