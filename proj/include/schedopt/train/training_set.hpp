#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace schedopt {

enum class GradientMethod { kAnalyticAdjoint, kCentralFiniteDifference };

/// Progressive-training configuration. A horizon of H step-varying entries is
/// trained block_size steps at a time; the steady-state entry is then fitted
/// on steps H..K with its coordinates tied across those steps.
struct TrainConfig {
  int block_size = 10;      // B
  int horizon = 50;         // H
  int train_horizon = 60;   // K
  int epochs = 200;
  double learning_rate = 0.1;
  GradientMethod method = GradientMethod::kAnalyticAdjoint;
  std::uint64_t seed = 0;

  void validate() const {
    if (block_size < 1) throw std::invalid_argument("block size must be >= 1");
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (train_horizon < horizon)
      throw std::invalid_argument("train horizon K must be >= H");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (learning_rate <= 0.0) throw std::invalid_argument("learning rate must be > 0");
  }
};

/// Sampled parameters with certified ground-truth solutions in the
/// operator's state space.
struct TrainingSet {
  std::vector<Eigen::VectorXd> parameters;
  std::vector<Eigen::VectorXd> solutions;

  int size() const { return static_cast<int>(parameters.size()); }

  void validate() const {
    if (parameters.size() != solutions.size())
      throw std::invalid_argument("training set parameters/solutions mismatch");
    if (parameters.empty()) throw std::invalid_argument("empty training set");
  }
};

/// Ground truth through the family's dedicated solver, certified by the
/// operator's own fixed-point residual at the fallback hyperparameters.
template <class Op, class Family>
Eigen::VectorXd generate_ground_truth(const Op& op, const Family& family,
                                      const Eigen::VectorXd& x,
                                      double tol = 1e-9) {
  const Eigen::VectorXd z_star = family.solve(x);
  const Eigen::VectorXd next = op.step(z_star, x, op.fallback_params());
  if ((next - z_star).norm() > tol)
    throw std::runtime_error("ground truth failed fixed-point certification");
  return z_star;
}

}  // namespace schedopt
