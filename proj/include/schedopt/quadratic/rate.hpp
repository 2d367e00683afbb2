#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace schedopt {

namespace detail {

inline double step_polynomial(const std::vector<double>& steps, double lambda) {
  double p = 1.0;
  for (double t : steps) p *= 1.0 - t * lambda;
  return p;
}

}  // namespace detail

/// Worst-case contraction max_j |prod_k (1 - t_k l_j)| over a discrete
/// spectrum; bounds ||z^K - z*|| / ||z^0 - z*|| for every instance.
inline double rate_certificate(const std::vector<double>& steps,
                               const Eigen::VectorXd& eigenvalues) {
  if (steps.empty()) throw std::invalid_argument("empty step list");
  double worst = 0.0;
  for (int j = 0; j < eigenvalues.size(); ++j)
    worst = std::max(worst,
                     std::abs(detail::step_polynomial(steps, eigenvalues[j])));
  return worst;
}

/// Worst-case contraction over the whole interval [mu, L]. For up to three
/// steps the maximum is found exactly from the critical points of the step
/// polynomial; otherwise a dense grid with local golden-section refinement is
/// used.
inline double rate_certificate_interval(const std::vector<double>& steps,
                                        double mu, double L) {
  if (steps.empty()) throw std::invalid_argument("empty step list");
  if (!(0.0 < mu && mu <= L)) throw std::invalid_argument("invalid interval");

  auto value = [&](double lam) {
    return std::abs(detail::step_polynomial(steps, lam));
  };

  double worst = std::max(value(mu), value(L));
  const std::size_t K = steps.size();
  if (K <= 3) {
    // p(l) = 1 - e1 l + e2 l^2 - e3 l^3 in the elementary symmetric functions.
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      e1 += steps[i];
      for (std::size_t j = i + 1; j < K; ++j) {
        e2 += steps[i] * steps[j];
        for (std::size_t k = j + 1; k < K; ++k) e3 += steps[i] * steps[j] * steps[k];
      }
    }
    // p'(l) = -e1 + 2 e2 l - 3 e3 l^2.
    std::vector<double> crit;
    if (K == 2) {
      if (e2 != 0.0) crit.push_back(e1 / (2.0 * e2));
    } else if (K == 3) {
      const double qa = -3.0 * e3, qb = 2.0 * e2, qc = -e1;
      const double disc = qb * qb - 4.0 * qa * qc;
      if (qa != 0.0 && disc >= 0.0) {
        const double r = std::sqrt(disc);
        crit.push_back((-qb + r) / (2.0 * qa));
        crit.push_back((-qb - r) / (2.0 * qa));
      } else if (qa == 0.0 && qb != 0.0) {
        crit.push_back(-qc / qb);
      }
    }
    for (double lam : crit)
      if (lam > mu && lam < L) worst = std::max(worst, value(lam));
    return worst;
  }

  constexpr int kGrid = 10000;
  double best_lam = mu;
  for (int i = 0; i <= kGrid; ++i) {
    const double lam = mu + (L - mu) * static_cast<double>(i) / kGrid;
    const double v = value(lam);
    if (v > worst) {
      worst = v;
      best_lam = lam;
    }
  }
  // Golden-section refinement around the best grid point.
  const double h = (L - mu) / kGrid;
  double lo = std::max(mu, best_lam - h);
  double hi = std::min(L, best_lam + h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = value(x1), f2 = value(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = value(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = value(x1);
    }
  }
  return std::max({worst, f1, f2});
}

}  // namespace schedopt
