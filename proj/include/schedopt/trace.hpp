#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "schedopt/schedule.hpp"

namespace schedopt {

enum class MetricKind { kSuboptimality, kMaxPrimalDualResidual };

/// Iterates z^0..z^k_eval of one run together with the per-iterate
/// performance metric once evaluated.
struct IterateTrace {
  std::vector<Eigen::VectorXd> iterates;
  std::vector<double> metric_values;
  MetricKind metric_kind = MetricKind::kSuboptimality;

  int length() const { return static_cast<int>(iterates.size()); }
};

class NonFiniteIterateError : public std::runtime_error {
 public:
  explicit NonFiniteIterateError(int step)
      : std::runtime_error("non-finite iterate produced at step " +
                           std::to_string(step)),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Runs k_eval fixed-point iterations under `sched`: iteration k consumes
/// sched.params_at(k), i.e. the step-varying entries below the horizon and the
/// steady-state entry from the horizon onwards. The trace holds k_eval + 1
/// iterates starting at z0.
template <class Op>
IterateTrace run_scheduled(const Op& op, const Schedule& sched,
                           const Eigen::VectorXd& x, int k_eval,
                           const Eigen::VectorXd& z0) {
  if (k_eval < 0) throw std::invalid_argument("k_eval must be non-negative");
  if (z0.size() != op.dim())
    throw std::invalid_argument("initial point dimension mismatch");
  if (sched.arity != op.arity())
    throw std::invalid_argument("schedule arity does not match operator");

  IterateTrace trace;
  trace.iterates.reserve(static_cast<std::size_t>(k_eval) + 1);
  trace.iterates.push_back(z0);
  Eigen::VectorXd z = z0;
  for (int k = 0; k < k_eval; ++k) {
    z = op.step(z, x, sched.params_at(k));
    if (!z.allFinite()) throw NonFiniteIterateError(k);
    trace.iterates.push_back(z);
  }
  return trace;
}

/// Same, starting from the zero vector.
template <class Op>
IterateTrace run_scheduled(const Op& op, const Schedule& sched,
                           const Eigen::VectorXd& x, int k_eval) {
  return run_scheduled(op, sched, x, k_eval, Eigen::VectorXd::Zero(op.dim()));
}

/// Evaluates a per-iterate metric phi(z, k) over a trace and attaches the
/// series to it.
template <class MetricFn>
std::vector<double> evaluate_metric(IterateTrace& trace, MetricKind kind,
                                    MetricFn&& phi) {
  std::vector<double> values;
  values.reserve(trace.iterates.size());
  for (std::size_t k = 0; k < trace.iterates.size(); ++k)
    values.push_back(phi(trace.iterates[k], static_cast<int>(k)));
  trace.metric_kind = kind;
  trace.metric_values = values;
  return values;
}

}  // namespace schedopt
