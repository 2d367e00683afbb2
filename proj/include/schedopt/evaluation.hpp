#pragma once

#include <vector>

#include <Eigen/Core>

#include "schedopt/trace.hpp"

namespace schedopt {

/// Suboptimality f(z^k, x) - f(z*(x), x) along a trace; the family supplies
/// the objective and the ground-truth solve.
template <class Family>
std::vector<double> suboptimality_series(const Family& family,
                                         IterateTrace& trace,
                                         const Eigen::VectorXd& x) {
  const Eigen::VectorXd z_star = family.solve(x);
  const double f_star = family.objective(z_star, x);
  return evaluate_metric(trace, MetricKind::kSuboptimality,
                         [&](const Eigen::VectorXd& z, int) {
                           return family.objective(z, x) - f_star;
                         });
}

}  // namespace schedopt
