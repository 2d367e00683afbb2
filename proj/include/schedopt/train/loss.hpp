#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "schedopt/train/reparam.hpp"
#include "schedopt/train/training_set.hpp"

namespace schedopt {

/// Free weights for one trained block of `steps` operator iterations. An
/// untied block holds one column of nu per step; a tied block (the
/// steady-state fit) holds a single column shared by every step. Column
/// entries map through the per-coordinate reparameterizations.
struct BlockParam {
  std::vector<ReparamSpec> specs;  // one per hyperparameter coordinate
  int steps = 1;
  bool tied = false;
  Eigen::MatrixXd nu;  // arity x (tied ? 1 : steps)

  int arity() const { return static_cast<int>(specs.size()); }
  int columns() const { return tied ? 1 : steps; }

  static BlockParam from_theta(const std::vector<ReparamSpec>& specs,
                               const Eigen::VectorXd& theta, int steps,
                               bool tied) {
    BlockParam b;
    b.specs = specs;
    b.steps = steps;
    b.tied = tied;
    b.nu.resize(static_cast<int>(specs.size()), b.columns());
    for (int col = 0; col < b.columns(); ++col)
      for (int i = 0; i < b.arity(); ++i)
        b.nu(i, col) = specs[static_cast<std::size_t>(i)].inverse(theta[i]);
    return b;
  }

  Eigen::VectorXd theta_at(int step) const {
    const int col = tied ? 0 : step;
    Eigen::VectorXd t(arity());
    for (int i = 0; i < arity(); ++i)
      t[i] = specs[static_cast<std::size_t>(i)].apply(nu(i, col));
    return t;
  }

  std::vector<Eigen::VectorXd> thetas() const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) out.push_back(theta_at(s));
    return out;
  }
};

/// Mean-square lookahead loss: unrolls the block from each start and sums the
/// masked squared distance to the ground truths.
template <class Op>
double lookahead_loss(const Op& op, const std::vector<Eigen::VectorXd>& thetas,
                      const std::vector<Eigen::VectorXd>& starts,
                      const std::vector<Eigen::VectorXd>& truths,
                      const std::vector<Eigen::VectorXd>& params) {
  if (starts.size() != truths.size() || starts.size() != params.size())
    throw std::invalid_argument("lookahead loss: instance list mismatch");
  const Eigen::VectorXd mask = op.loss_mask();
  double loss = 0.0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Eigen::VectorXd z = starts[i];
    for (const auto& theta : thetas) z = op.step(z, params[i], theta);
    loss += (mask.array() * (z - truths[i]).array()).matrix().squaredNorm();
  }
  if (!std::isfinite(loss)) throw std::runtime_error("non-finite lookahead loss");
  return loss;
}

template <class Op>
double lookahead_loss(const Op& op, const BlockParam& block,
                      const std::vector<Eigen::VectorXd>& starts,
                      const std::vector<Eigen::VectorXd>& truths,
                      const std::vector<Eigen::VectorXd>& params) {
  return lookahead_loss(op, block.thetas(), starts, truths, params);
}

/// Loss gradient with respect to the free weights nu, flattened column-major
/// to match block.nu. The adjoint path backpropagates through the unrolled
/// steps via the operator's step_vjp; the finite-difference path perturbs
/// each nu coordinate centrally with h = 1e-6 * max(1, |nu|).
template <class Op>
Eigen::MatrixXd lookahead_gradient(const Op& op, const BlockParam& block,
                                   const std::vector<Eigen::VectorXd>& starts,
                                   const std::vector<Eigen::VectorXd>& truths,
                                   const std::vector<Eigen::VectorXd>& params,
                                   GradientMethod method) {
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(block.arity(), block.columns());

  if (method == GradientMethod::kCentralFiniteDifference) {
    BlockParam probe = block;
    for (int col = 0; col < block.columns(); ++col)
      for (int i = 0; i < block.arity(); ++i) {
        const double nu0 = block.nu(i, col);
        const double h = 1e-6 * std::max(1.0, std::abs(nu0));
        probe.nu(i, col) = nu0 + h;
        const double up = lookahead_loss(op, probe, starts, truths, params);
        probe.nu(i, col) = nu0 - h;
        const double down = lookahead_loss(op, probe, starts, truths, params);
        probe.nu(i, col) = nu0;
        grad(i, col) = (up - down) / (2.0 * h);
      }
    return grad;
  }

  const auto thetas = block.thetas();
  const Eigen::VectorXd mask = op.loss_mask();
  for (std::size_t inst = 0; inst < starts.size(); ++inst) {
    // Forward pass, keeping every intermediate state.
    std::vector<Eigen::VectorXd> states;
    states.reserve(thetas.size() + 1);
    states.push_back(starts[inst]);
    for (const auto& theta : thetas)
      states.push_back(op.step(states.back(), params[inst], theta));

    Eigen::VectorXd cot =
        2.0 * (mask.array().square() *
               (states.back() - truths[inst]).array()).matrix();
    for (int s = block.steps - 1; s >= 0; --s) {
      const auto vjp = op.step_vjp(states[static_cast<std::size_t>(s)],
                                   params[inst], thetas[static_cast<std::size_t>(s)], cot);
      const int col = block.tied ? 0 : s;
      grad.col(col) += vjp.grad_theta;
      cot = vjp.grad_state;
    }
  }
  // Chain theta = reparam(nu).
  for (int col = 0; col < block.columns(); ++col)
    for (int i = 0; i < block.arity(); ++i)
      grad(i, col) *= block.specs[static_cast<std::size_t>(i)].derivative(block.nu(i, col));
  if (!grad.allFinite()) throw std::runtime_error("non-finite loss gradient");
  return grad;
}

}  // namespace schedopt
