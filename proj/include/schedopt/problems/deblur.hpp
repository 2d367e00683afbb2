#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "schedopt/algorithms/admm_qp.hpp"
#include "schedopt/rng.hpp"

namespace schedopt {

/// Image deblurring family: recover a side x side image w in [0,1]^q from a
/// blurred, noisy observation x = clip(B w_true + noise). The estimation
/// problem
///   min ||B w - x||^2 + lambda ||w||_1   s.t.  0 <= w <= 1
/// is a box QP: since w >= 0 makes ||w||_1 = 1'w, it canonicalizes with
/// P = 2 B'B, c(x) = -2 B'x + lambda 1 and identity constraint rows, so P and
/// the constraint matrix are shared by all instances.
class DeblurFamily {
 public:
  static DeblurFamily generate(int side, int blur_width, double noise_sd,
                               double lambda_reg, std::uint64_t seed) {
    if (side < 4) throw std::invalid_argument("deblur needs side >= 4");
    if (blur_width < 1) throw std::invalid_argument("deblur needs blur_width >= 1");
    return DeblurFamily(side, blur_width, noise_sd, lambda_reg, seed);
  }

  int side() const { return side_; }
  int pixels() const { return side_ * side_; }
  int dim() const { return pixels(); }
  int parameter_dim() const { return pixels(); }
  double regularizer() const { return lambda_; }
  const Eigen::MatrixXd& blur() const { return blur_; }
  const QpData& qp() const { return qp_; }
  double qp_smoothness() const { return qp_L_; }

  /// Smooth QP objective (1/2) w'Pw + c(x)'w and its gradient, used for
  /// finite-difference checks and the reference box solve.
  double objective(const Eigen::VectorXd& w, const Eigen::VectorXd& x) const {
    return 0.5 * w.dot(qp_.cost_matrix * w) + qp_.linear_cost(x).dot(w);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& w, const Eigen::VectorXd& x) const {
    return qp_.cost_matrix * w + qp_.linear_cost(x);
  }

  Eigen::VectorXd parameter(std::uint64_t stream, int index) const {
    Rng rng(derive_seed(seed_, stream, static_cast<std::uint64_t>(index)));
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(pixels());
    const int bright = std::max(1, pixels() / 10);
    for (int i = 0; i < bright; ++i)
      truth[rng.uniform_int(0, pixels() - 1)] = 1.0;
    Eigen::VectorXd obs = blur_ * truth;
    for (int i = 0; i < obs.size(); ++i) obs[i] += noise_sd_ * rng.normal();
    return obs.cwiseMax(0.0).cwiseMin(1.0);
  }

  /// Reference box-QP solve by projected accelerated gradient with adaptive
  /// restart; certified by the projected fixed-point residual.
  Eigen::VectorXd solve(const Eigen::VectorXd& x, double tol = 1e-10,
                        int max_iters = 400000) const {
    const double step = 1.0 / qp_L_;
    auto clip = [](const Eigen::VectorXd& v) {
      return v.cwiseMax(0.0).cwiseMin(1.0).eval();
    };
    Eigen::VectorXd z = Eigen::VectorXd::Zero(pixels());
    Eigen::VectorXd y_prev = z;
    double t = 1.0;
    for (int k = 0; k < max_iters; ++k) {
      const Eigen::VectorXd y = clip(z - step * gradient(z, x));
      if ((y - z).dot(y - y_prev) < 0.0) t = 1.0;
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      z = y + ((t - 1.0) / t_next) * (y - y_prev);
      y_prev = y;
      t = t_next;
      if (k % 32 == 0 &&
          (y - clip(y - step * gradient(y, x))).norm() <= tol)
        return y;
    }
    const Eigen::VectorXd y = y_prev;
    if ((y - clip(y - step * gradient(y, x))).norm() > 1e-8)
      throw std::runtime_error("deblur reference solve failed to certify");
    return y;
  }

 private:
  DeblurFamily(int side, int blur_width, double noise_sd, double lambda_reg,
               std::uint64_t seed)
      : side_(side), noise_sd_(noise_sd), lambda_(lambda_reg), seed_(seed) {
    blur_ = make_blur(side, blur_width);
    qp_ = canonical_qp(blur_, lambda_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qp_.cost_matrix);
    qp_L_ = eig.eigenvalues().maxCoeff();
  }

  /// Dense 2-D Gaussian blur with zero padding; interior rows sum to one and
  /// boundary rows to less.
  static Eigen::MatrixXd make_blur(int side, int width) {
    const int q = side * side;
    const double center = (width - 1) / 2.0;
    const double sigma = std::max(0.5, width / 2.0);
    Eigen::MatrixXd kernel(width, width);
    double total = 0.0;
    for (int a = 0; a < width; ++a)
      for (int b = 0; b < width; ++b) {
        const double dx = a - center, dy = b - center;
        kernel(a, b) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        total += kernel(a, b);
      }
    kernel /= total;

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(q, q);
    const int off = (width - 1) / 2;
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c)
        for (int a = 0; a < width; ++a)
          for (int b = 0; b < width; ++b) {
            const int rr = r + a - off;
            const int cc = c + b - off;
            if (rr < 0 || rr >= side || cc < 0 || cc >= side) continue;
            B(r * side + c, rr * side + cc) += kernel(a, b);
          }
    return B;
  }

  static QpData canonical_qp(const Eigen::MatrixXd& blur, double lambda) {
    const int q = static_cast<int>(blur.rows());
    QpData qp;
    qp.cost_matrix = 2.0 * blur.transpose() * blur;
    qp.constraint_matrix = Eigen::MatrixXd::Identity(q, q);
    qp.lower = Eigen::VectorXd::Zero(q);
    qp.upper = Eigen::VectorXd::Ones(q);
    qp.num_equalities = 0;
    qp.cost_map = -2.0 * blur.transpose();
    qp.cost_offset = Eigen::VectorXd::Constant(q, lambda);
    return qp;
  }

  int side_;
  double noise_sd_;
  double lambda_;
  std::uint64_t seed_;
  Eigen::MatrixXd blur_;
  QpData qp_;
  double qp_L_ = 0.0;
};

/// Canonical QP data of a deblurring family.
inline QpData canonicalize_deblur(const DeblurFamily& family) { return family.qp(); }

}  // namespace schedopt
