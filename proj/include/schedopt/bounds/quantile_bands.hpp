#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "schedopt/bounds/kl.hpp"
#include "schedopt/trace.hpp"

namespace schedopt {

/// Log-spaced tolerance grid, strictly decreasing from tol_max to tol_min.
inline std::vector<double> tolerance_grid(double tol_max, double tol_min,
                                          int count) {
  if (count < 1 || tol_min <= 0.0 || tol_max <= tol_min)
    throw std::invalid_argument("invalid tolerance grid");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = tol_max;
    return grid;
  }
  const double lmax = std::log10(tol_max), lmin = std::log10(tol_min);
  for (int i = 0; i < count; ++i)
    grid[static_cast<std::size_t>(i)] =
        std::pow(10.0, lmax + (lmin - lmax) * i / (count - 1.0));
  return grid;
}

struct RiskBoundConfig {
  int n_val = 1000;
  double delta = 1e-5;
  std::vector<double> grid = tolerance_grid(1e5, 1e-10, 151);
  int iteration = 0;
  MetricKind metric = MetricKind::kSuboptimality;

  void validate() const {
    if (n_val < 1) throw std::invalid_argument("N_val must be >= 1");
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("delta must lie in (0, 1)");
    if (grid.empty()) throw std::invalid_argument("empty tolerance grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] < grid[i - 1]))
        throw std::invalid_argument("tolerance grid must be strictly decreasing");
  }
};

/// Fraction of instances whose metric at the chosen step is >= eps.
inline double empirical_risk(const std::vector<double>& metric_at_step,
                             double eps) {
  if (metric_at_step.empty())
    throw std::invalid_argument("empirical risk of empty validation set");
  std::size_t hits = 0;
  for (double v : metric_at_step)
    if (v >= eps) ++hits;
  return static_cast<double>(hits) / static_cast<double>(metric_at_step.size());
}

/// Instance-series overload: series[i] is the metric trajectory of
/// validation instance i, evaluated at step k.
inline double empirical_risk(const std::vector<std::vector<double>>& series,
                             int k, double eps) {
  std::vector<double> at;
  at.reserve(series.size());
  for (const auto& s : series) {
    if (k < 0 || static_cast<std::size_t>(k) >= s.size())
      throw std::invalid_argument("instance not evaluated to requested step");
    at.push_back(s[static_cast<std::size_t>(k)]);
  }
  return empirical_risk(at, eps);
}

struct RiskBandRow {
  double eps = 0.0;
  double empirical = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct QuantileBand {
  double level = 0.0;  // quantile level tau
  double lower = 0.0;
  double upper = 0.0;
  bool lower_at_grid_edge = false;
  bool upper_at_grid_edge = false;
};

struct QuantileBandResult {
  std::vector<RiskBandRow> rows;  // in grid order (eps decreasing)
  std::vector<QuantileBand> bands;
  double confidence = 0.0;  // 1 - 2 delta N_tol, both sides simultaneously
};

/// Certified risk bounds per grid tolerance plus quantile bands. For each
/// eps the risk P(phi >= eps) is sandwiched via the Bernoulli-KL sample
/// bound at budget log(2/delta)/N_val; a union bound over the grid and both
/// sides gives the joint confidence. The upper bound on the tau-quantile is
/// the smallest eps whose certified risk upper bound is <= 1 - tau, the
/// lower bound the largest eps whose certified lower bound is >= 1 - tau;
/// unresolved levels report the grid edge and a flag.
inline QuantileBandResult quantile_bands(
    const std::vector<double>& metric_at_step, const RiskBoundConfig& cfg,
    const std::vector<double>& quantile_levels) {
  cfg.validate();
  if (static_cast<int>(metric_at_step.size()) != cfg.n_val)
    throw std::invalid_argument("validation metric count differs from N_val");

  const double budget = std::log(2.0 / cfg.delta) / cfg.n_val;
  QuantileBandResult result;
  result.rows.reserve(cfg.grid.size());
  for (double eps : cfg.grid) {
    RiskBandRow row;
    row.eps = eps;
    row.empirical = empirical_risk(metric_at_step, eps);
    row.upper = kl_inverse_upper(row.empirical, budget);
    row.lower = kl_inverse_lower(row.empirical, budget);
    result.rows.push_back(row);
  }
  result.confidence =
      1.0 - 2.0 * cfg.delta * static_cast<double>(cfg.grid.size());

  for (double tau : quantile_levels) {
    QuantileBand band;
    band.level = tau;
    // Smallest eps certifying P(phi >= eps) <= 1 - tau. Grid order is
    // decreasing, so scan from the front and keep the last certified row.
    band.upper_at_grid_edge = true;
    band.upper = cfg.grid.front();
    for (const auto& row : result.rows) {
      if (row.upper <= 1.0 - tau) {
        band.upper = row.eps;
        band.upper_at_grid_edge = false;
      } else if (!band.upper_at_grid_edge) {
        break;
      }
    }
    // Largest eps certifying P(phi >= eps) >= 1 - tau.
    band.lower_at_grid_edge = true;
    band.lower = cfg.grid.back();
    for (const auto& row : result.rows) {
      if (row.lower >= 1.0 - tau) {
        band.lower = row.eps;
        band.lower_at_grid_edge = false;
        break;  // grid is decreasing; the first hit is the largest eps
      }
    }
    result.bands.push_back(band);
  }
  return result;
}

}  // namespace schedopt
