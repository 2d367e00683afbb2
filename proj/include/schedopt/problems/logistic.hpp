#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "schedopt/problems/streams.hpp"
#include "schedopt/rng.hpp"

namespace schedopt {

/// Binary logistic regression over synthetic two-cluster data. Each instance
/// carries its own dataset packed into the parameter vector:
///   x = (row-major covariates V in R^{m x q}, labels y in {0,1}^m),
/// and the decision variable is (w, bias) in R^{q+1}. The objective is the
/// mean negative log-likelihood, which is convex and L-smooth with
/// L = lambda_max(V1' V1) / (4m) for the one-augmented covariate matrix V1.
class LogisticFamily {
 public:
  static LogisticFamily generate(int points, int cov_dim, double separation,
                                 std::uint64_t seed) {
    if (points < 2 || points % 2 != 0)
      throw std::invalid_argument("logistic needs an even number of points");
    if (cov_dim < 1) throw std::invalid_argument("logistic needs cov_dim >= 1");
    LogisticFamily fam(points, cov_dim, separation, seed);
    // Family-level smoothness: calibrated over a dedicated instance stream
    // with a small safety margin, since L varies mildly across instances.
    double worst = 0.0;
    for (int i = 0; i < 32; ++i)
      worst = std::max(worst,
                       fam.instance_smoothness(fam.parameter(kCalibrationStream, i)));
    fam.L_ = 1.05 * worst;
    return fam;
  }

  int dim() const { return cov_dim_ + 1; }
  int parameter_dim() const { return (cov_dim_ + 1) * points_; }
  int points() const { return points_; }
  int cov_dim() const { return cov_dim_; }
  double smoothness() const { return L_; }

  Eigen::VectorXd parameter(std::uint64_t stream, int index) const {
    Rng rng(derive_seed(seed_, stream, static_cast<std::uint64_t>(index)));
    const int half = points_ / 2;
    Eigen::VectorXd mean = Eigen::VectorXd::Constant(
        cov_dim_, separation_ / std::sqrt(static_cast<double>(cov_dim_)));
    Eigen::VectorXd x(parameter_dim());
    for (int j = 0; j < points_; ++j) {
      const double sign = j < half ? 1.0 : -1.0;
      for (int d = 0; d < cov_dim_; ++d)
        x[j * cov_dim_ + d] = sign * mean[d] + rng.normal();
    }
    for (int j = 0; j < points_; ++j)
      x[points_ * cov_dim_ + j] = j < half ? 1.0 : 0.0;
    return x;
  }

  double objective(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    double total = 0.0;
    for (int j = 0; j < points_; ++j) {
      const double a = activation(z, x, j);
      const double y = label(x, j);
      // softplus forms keep the value finite for large |a|
      total += softplus(-a) * y + softplus(a) * (1.0 - y);
    }
    return total / points_;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
    for (int j = 0; j < points_; ++j) {
      const double r = sigmoid(activation(z, x, j)) - label(x, j);
      for (int d = 0; d < cov_dim_; ++d) g[d] += r * covariate(x, j, d);
      g[cov_dim_] += r;
    }
    return g / points_;
  }

  Eigen::VectorXd hess_vec(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& u) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    for (int j = 0; j < points_; ++j) {
      const double s = sigmoid(activation(z, x, j));
      double au = u[cov_dim_];
      for (int d = 0; d < cov_dim_; ++d) au += u[d] * covariate(x, j, d);
      const double r = s * (1.0 - s) * au;
      for (int d = 0; d < cov_dim_; ++d) out[d] += r * covariate(x, j, d);
      out[cov_dim_] += r;
    }
    return out / points_;
  }

  double instance_smoothness(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd V1(points_, dim());
    for (int j = 0; j < points_; ++j) {
      for (int d = 0; d < cov_dim_; ++d) V1(j, d) = covariate(x, j, d);
      V1(j, cov_dim_) = 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(V1.transpose() * V1);
    return eig.eigenvalues().maxCoeff() / (4.0 * points_);
  }

  /// Damped Newton to machine precision. Throws when no finite minimizer is
  /// reachable (i.e. the sampled dataset happens to be separable).
  Eigen::VectorXd solve(const Eigen::VectorXd& x) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim());
    for (int it = 0; it < 200; ++it) {
      const Eigen::VectorXd g = gradient(z, x);
      if (g.lpNorm<Eigen::Infinity>() <= 1e-13) return z;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim(), dim());
      for (int d = 0; d < dim(); ++d) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(dim(), d);
        H.col(d) = hess_vec(z, x, e);
      }
      H.diagonal().array() += 1e-14;
      const Eigen::VectorXd step = H.llt().solve(g);
      double alpha = 1.0;
      const double f0 = objective(z, x);
      while (alpha > 1e-8 && objective(z - alpha * step, x) > f0) alpha *= 0.5;
      z -= alpha * step;
      if (z.norm() > 1e7)
        throw std::runtime_error(
            "logistic instance appears separable; no finite minimizer");
    }
    throw std::runtime_error("logistic Newton solve did not converge");
  }

 private:
  LogisticFamily(int points, int cov_dim, double separation, std::uint64_t seed)
      : points_(points), cov_dim_(cov_dim), separation_(separation), seed_(seed) {}

  static double sigmoid(double a) {
    return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a))
                    : std::exp(a) / (1.0 + std::exp(a));
  }
  static double softplus(double a) {
    return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
  }

  double covariate(const Eigen::VectorXd& x, int j, int d) const {
    return x[j * cov_dim_ + d];
  }
  double label(const Eigen::VectorXd& x, int j) const {
    return x[points_ * cov_dim_ + j];
  }
  double activation(const Eigen::VectorXd& z, const Eigen::VectorXd& x, int j) const {
    double a = z[cov_dim_];
    for (int d = 0; d < cov_dim_; ++d) a += z[d] * covariate(x, j, d);
    return a;
  }

  int points_;
  int cov_dim_;
  double separation_;
  std::uint64_t seed_;
  double L_ = 0.0;
};

}  // namespace schedopt
