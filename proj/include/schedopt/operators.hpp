#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace schedopt {

// A fixed-point operator models one algorithm step z' = T(z, x, theta) for a
// parametric convex problem. Implementations provide:
//
//   int dim() const;                    // state dimension n
//   int arity() const;                  // hyperparameters per step (a)
//   Eigen::VectorXd step(z, x, theta);  // deterministic, dim-preserving
//   ValidityReport check_steady_state(theta);
//   Eigen::VectorXd fallback_params();  // known-safe defaults
//
// Differentiable operators additionally provide step_vjp (reverse-mode step)
// and loss_mask (state coordinates that enter the training loss).

struct ConstraintCheck {
  std::string name;
  bool ok = false;
  double value = 0.0;
};

struct ValidityReport {
  bool ok = false;
  std::vector<ConstraintCheck> checks;

  std::string describe() const {
    std::string out;
    for (const auto& c : checks) {
      out += c.name;
      out += c.ok ? " ok" : " VIOLATED";
      out += " (value " + std::to_string(c.value) + "); ";
    }
    return out;
  }
};

/// Cotangents of one operator step: d loss / d input-state and d loss / d theta
/// given d loss / d output-state.
struct StepVjp {
  Eigen::VectorXd grad_state;
  Eigen::VectorXd grad_theta;
};

/// Cotangents of a step-scaled proximal map prox(v, step).
struct ProxVjp {
  Eigen::VectorXd grad_input;
  double grad_step = 0.0;
};

}  // namespace schedopt
