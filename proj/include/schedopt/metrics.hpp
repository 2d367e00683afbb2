#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace schedopt {

/// Metric values are clipped at this floor before log-domain aggregation.
inline constexpr double kMetricFloor = 1e-12;

/// Geometric mean (prod v_i)^(1/N), computed in the log domain. Values are
/// clipped at kMetricFloor first so that converged (or slightly negative)
/// suboptimalities remain aggregable.
inline double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("geometric mean of empty list");
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(std::max(v, kMetricFloor));
  return std::exp(log_sum / static_cast<double>(values.size()));
}

/// Geometric mean across instances at every iteration. `series[i][k]` is the
/// metric of instance i at iteration k; all series must have equal length.
inline std::vector<double> geometric_mean_series(
    const std::vector<std::vector<double>>& series) {
  if (series.empty()) throw std::invalid_argument("no metric series given");
  const std::size_t len = series.front().size();
  std::vector<double> out(len, 0.0);
  for (const auto& s : series) {
    if (s.size() != len) throw std::invalid_argument("ragged metric series");
    for (std::size_t k = 0; k < len; ++k)
      out[k] += std::log(std::max(s[k], kMetricFloor));
  }
  for (double& v : out) v = std::exp(v / static_cast<double>(series.size()));
  return out;
}

/// First iteration at which the metric reaches `tol`, or `sentinel` if never.
inline int iterations_to_tolerance(const std::vector<double>& series, double tol,
                                   int sentinel) {
  for (std::size_t k = 0; k < series.size(); ++k)
    if (series[k] <= tol) return static_cast<int>(k);
  return sentinel;
}

}  // namespace schedopt
