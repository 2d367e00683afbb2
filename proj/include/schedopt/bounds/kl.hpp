#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace schedopt {

/// KL divergence between Bernoulli(q) and Bernoulli(p), with the 0 log 0 = 0
/// convention. Returns +inf when p is degenerate and q disagrees.
inline double kl_bernoulli(double q, double p) {
  if (q < 0.0 || q > 1.0 || p < 0.0 || p > 1.0)
    throw std::invalid_argument("kl_bernoulli arguments must lie in [0, 1]");
  constexpr double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  if (q > 0.0) {
    if (p == 0.0) return inf;
    total += q * std::log(q / p);
  }
  if (q < 1.0) {
    if (p == 1.0) return inf;
    total += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
  }
  return total;
}

/// Largest p in [0, 1] with kl(q || p) <= c; kl(q || .) is increasing on
/// [q, 1], so bisection applies.
inline double kl_inverse_upper(double q, double c) {
  if (c < 0.0) throw std::invalid_argument("kl inverse needs c >= 0");
  double lo = q;
  double hi = 1.0;
  if (kl_bernoulli(q, hi) <= c) return hi;
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kl_bernoulli(q, mid) <= c)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

/// Smallest p consistent with the empirical rate: the same bound applied to
/// the success side, 1 - kl_inverse_upper(1 - q, c).
inline double kl_inverse_lower(double q, double c) {
  return 1.0 - kl_inverse_upper(1.0 - q, c);
}

}  // namespace schedopt
