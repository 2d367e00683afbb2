#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Core>

#include "schedopt/schedule.hpp"
#include "schedopt/trace.hpp"

namespace schedopt {

/// Runtime monitor for learned schedules on unconstrained families. The
/// suboptimality estimate f(z, x) - objective_floor uses the average optimal
/// value over the training instances as the floor; a step whose estimate
/// grows past `factor` times a positive previous estimate (or turns
/// non-finite) is discarded and replaced by the fallback update, which is
/// then used for every remaining step.
struct SafeguardPolicy {
  double factor = 10.0;
  Eigen::VectorXd fallback;
  double objective_floor = 0.0;
};

struct SafeguardResult {
  IterateTrace trace;
  std::optional<int> triggered_at;
  long operator_evals = 0;
};

template <class Op, class ObjectiveFn>
SafeguardResult safeguarded_run(const Op& op, const Schedule& sched,
                                const SafeguardPolicy& policy,
                                const Eigen::VectorXd& x, int k_eval,
                                ObjectiveFn&& objective) {
  if (!(policy.factor > 1.0))
    throw std::invalid_argument("safeguard factor must exceed 1");

  SafeguardResult result;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(op.dim());
  result.trace.iterates.reserve(static_cast<std::size_t>(k_eval) + 1);
  result.trace.iterates.push_back(z);

  double prev_estimate = objective(z, x) - policy.objective_floor;
  for (int k = 0; k < k_eval; ++k) {
    Eigen::VectorXd next;
    if (!result.triggered_at) {
      Eigen::VectorXd candidate = op.step(z, x, sched.params_at(k));
      ++result.operator_evals;
      const double estimate =
          candidate.allFinite()
              ? objective(candidate, x) - policy.objective_floor
              : std::numeric_limits<double>::infinity();
      const bool blown =
          !std::isfinite(estimate) ||
          (prev_estimate > 0.0 && estimate > policy.factor * prev_estimate);
      if (blown) {
        result.triggered_at = k;
        next = op.step(z, x, policy.fallback);
        ++result.operator_evals;
      } else {
        next = std::move(candidate);
      }
    } else {
      next = op.step(z, x, policy.fallback);
      ++result.operator_evals;
    }
    if (!next.allFinite()) throw NonFiniteIterateError(k);
    z = std::move(next);
    result.trace.iterates.push_back(z);
    prev_estimate = objective(z, x) - policy.objective_floor;
  }
  return result;
}

}  // namespace schedopt
