#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace schedopt {

/// Separable form of the quadratic training objective. With P = Q diag(l) Q'
/// the mean-square training loss after steps (t_1..t_B) is
///   sum_j prod_b (1 - t_b l_j)^2 * weights_j,
/// where weights_j aggregates the squared eigen-coordinates of the current
/// iterate errors.
struct EigenReduction {
  Eigen::VectorXd eigenvalues;  // ascending, all positive
  Eigen::MatrixXd basis;        // orthonormal Q
  Eigen::VectorXd weights;      // nonnegative
  int step_index = 0;

  int modes() const { return static_cast<int>(eigenvalues.size()); }
};

/// Parameter distribution x ~ N(mean, covariance) for the stochastic
/// training problem.
struct GaussianParameterModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

namespace detail {

inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spd_eigen(
    const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols() || !P.isApprox(P.transpose(), 1e-9))
    throw std::invalid_argument("P must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("P must be positive definite");
  return eig;
}

}  // namespace detail

/// Reduction from explicit per-instance errors z^k(x_i) - z*(x_i):
/// weights_j = sum_i (Q'(z^k - z*))_j^2.
inline EigenReduction reduce_deterministic(
    const Eigen::MatrixXd& P, const std::vector<Eigen::VectorXd>& errors) {
  auto eig = detail::spd_eigen(P);
  EigenReduction red;
  red.eigenvalues = eig.eigenvalues();
  red.basis = eig.eigenvectors();
  red.weights = Eigen::VectorXd::Zero(P.rows());
  for (const auto& e : errors) {
    if (e.size() != P.rows())
      throw std::invalid_argument("error vector dimension mismatch");
    red.weights += (red.basis.transpose() * e).array().square().matrix();
  }
  return red;
}

/// Weight propagation through gradient steps: each step t multiplies the
/// j-th weight by (1 - t l_j)^2.
inline EigenReduction propagate_weights(const EigenReduction& red,
                                        const std::vector<double>& steps) {
  EigenReduction out = red;
  for (double t : steps)
    out.weights.array() *=
        (1.0 - t * out.eigenvalues.array()).square();
  out.step_index += static_cast<int>(steps.size());
  return out;
}

/// Reduction of the expectation objective for x ~ N(mean, covariance) on
/// (1/2) z'Pz + x'z started from zero. With b_j the j-th column of Q,
/// the base weights are ((b_j'mean)^2 + b_j' covariance b_j) / l_j^2, and a
/// learned prefix enters through the usual per-step factors.
inline EigenReduction reduce_gaussian(const Eigen::MatrixXd& P,
                                      const GaussianParameterModel& model,
                                      const std::vector<double>& theta_prefix = {}) {
  auto eig = detail::spd_eigen(P);
  const int n = static_cast<int>(P.rows());
  if (model.mean.size() != n || model.covariance.rows() != n ||
      model.covariance.cols() != n)
    throw std::invalid_argument("parameter model dimension mismatch");

  EigenReduction red;
  red.eigenvalues = eig.eigenvalues();
  red.basis = eig.eigenvectors();
  red.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    const auto bj = red.basis.col(j);
    const double mean_part = bj.dot(model.mean);
    const double var_part = bj.dot(model.covariance * bj);
    red.weights[j] =
        (mean_part * mean_part + var_part) / (red.eigenvalues[j] * red.eigenvalues[j]);
  }
  return propagate_weights(red, theta_prefix);
}

/// Objective value sum_j prod_b (1 - t_b l_j)^2 weights_j.
inline double reduction_objective(const EigenReduction& red,
                                  const std::vector<double>& steps) {
  double total = 0.0;
  for (int j = 0; j < red.modes(); ++j) {
    double factor = 1.0;
    for (double t : steps) {
      const double d = 1.0 - t * red.eigenvalues[j];
      factor *= d * d;
    }
    total += factor * red.weights[j];
  }
  return total;
}

}  // namespace schedopt
