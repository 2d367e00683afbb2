#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "schedopt/quadratic/reduction.hpp"

namespace schedopt {

/// Weighted power sums a..f = sum_j l_j^p w_j for p = 1..6; these carry all
/// the information the one/two/three-step solutions need.
struct MomentCoefficients {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;

  static MomentCoefficients from(const EigenReduction& red) {
    MomentCoefficients m;
    for (int j = 0; j < red.modes(); ++j) {
      const double l = red.eigenvalues[j];
      const double w = red.weights[j];
      double p = l * w;
      m.a += p;
      p *= l;
      m.b += p;
      p *= l;
      m.c += p;
      p *= l;
      m.d += p;
      p *= l;
      m.e += p;
      p *= l;
      m.f += p;
    }
    return m;
  }
};

namespace detail {

/// Modes with equal eigenvalues act as one in the separable objective; merge
/// them and drop negligible weights before counting distinct active modes.
inline std::vector<std::pair<double, double>> merged_active_modes(
    const EigenReduction& red) {
  const double wmax = red.weights.size() ? red.weights.maxCoeff() : 0.0;
  const double wtol = wmax * 1e-12;
  const double ltol = (red.modes() ? red.eigenvalues[red.modes() - 1] : 0.0) * 1e-10;
  std::vector<std::pair<double, double>> modes;  // (eigenvalue, weight)
  for (int j = 0; j < red.modes(); ++j) {
    if (red.weights[j] <= wtol) continue;
    if (!modes.empty() && red.eigenvalues[j] - modes.back().first <= ltol)
      modes.back().second += red.weights[j];
    else
      modes.emplace_back(red.eigenvalues[j], red.weights[j]);
  }
  return modes;
}

}  // namespace detail

/// Least-squares optimal single step sum(l w) / sum(l^2 w); nonnegative for
/// any nonnegative weights.
inline double one_step_optimal(const EigenReduction& red) {
  const auto m = MomentCoefficients::from(red);
  if (m.b <= 0.0)
    throw std::invalid_argument("one-step solution undefined: all weights zero");
  return m.a / m.b;
}

/// Globally optimal step pair, the two roots of
///   (bd - c^2) t^2 + (bc - ad) t + (ac - b^2) = 0,
/// returned largest first. Requires two distinct active modes; with fewer the
/// problem degenerates and the solution cascades to repeated single steps.
inline std::array<double, 2> two_step_optimal(const EigenReduction& red) {
  const auto modes = detail::merged_active_modes(red);
  if (modes.empty())
    throw std::invalid_argument("two-step solution undefined: all weights zero");

  const auto m = MomentCoefficients::from(red);
  const double c2 = m.b * m.d - m.c * m.c;
  if (modes.size() < 2 || c2 < 1e-14 * m.b * m.d) {
    // Degenerate: single active mode. The first step annihilates it; any
    // further annihilated reduction admits every step, so repeat.
    const double t1 = one_step_optimal(red);
    const EigenReduction next = propagate_weights(red, {t1});
    const auto mn = MomentCoefficients::from(next);
    const double t2 = mn.b > 0.0 ? mn.a / mn.b : t1;
    return {std::max(t1, t2), std::min(t1, t2)};
  }

  const double c1 = m.b * m.c - m.a * m.d;
  const double c0 = m.a * m.c - m.b * m.b;
  const double disc = std::max(0.0, c1 * c1 - 4.0 * c0 * c2);
  const double root = std::sqrt(disc);
  const double hi = (-c1 + root) / (2.0 * c2);
  const double lo = (-c1 - root) / (2.0 * c2);
  return {hi, lo};
}

/// All real roots (with multiplicity) of d3 t^3 + d2 t^2 + d1 t + d0 = 0.
/// Degrades to the quadratic/linear case when leading coefficients vanish.
/// Roots are Newton-polished on the original polynomial.
inline std::vector<double> solve_cubic_real(double d3, double d2, double d1,
                                            double d0) {
  const double scale =
      std::max({std::abs(d3), std::abs(d2), std::abs(d1), std::abs(d0)});
  if (scale == 0.0)
    throw std::invalid_argument("cubic with all-zero coefficients");

  std::vector<double> roots;
  if (std::abs(d3) <= 1e-14 * scale) {
    if (std::abs(d2) <= 1e-14 * scale) {
      if (std::abs(d1) <= 1e-14 * scale) return roots;  // nonzero constant
      roots.push_back(-d0 / d1);
      return roots;
    }
    const double disc = d1 * d1 - 4.0 * d2 * d0;
    if (disc >= 0.0) {
      const double r = std::sqrt(disc);
      roots.push_back((-d1 + r) / (2.0 * d2));
      roots.push_back((-d1 - r) / (2.0 * d2));
    }
    return roots;
  }

  // Depressed cubic t = s - p/3:  s^3 + ps s + qs = 0.
  const double p = d2 / d3;
  const double q = d1 / d3;
  const double r = d0 / d3;
  const double ps = q - p * p / 3.0;
  const double qs = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
  const double shift = -p / 3.0;
  const double delta = qs * qs / 4.0 + ps * ps * ps / 27.0;

  if (delta > 1e-14 * scale * scale) {
    const double sq = std::sqrt(delta);
    const double s = std::cbrt(-qs / 2.0 + sq) + std::cbrt(-qs / 2.0 - sq);
    roots.push_back(s + shift);
  } else if (ps >= -1e-300) {
    // Triple (or near-triple) root.
    roots.assign(3, shift + std::cbrt(-qs));
  } else {
    const double m = 2.0 * std::sqrt(-ps / 3.0);
    double arg = 3.0 * qs / (ps * m);
    arg = std::clamp(arg, -1.0, 1.0);
    const double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k)
      roots.push_back(m * std::cos((phi - 2.0 * M_PI * k) / 3.0) + shift);
  }

  auto poly = [&](double t) { return ((d3 * t + d2) * t + d1) * t + d0; };
  auto dpoly = [&](double t) { return (3.0 * d3 * t + 2.0 * d2) * t + d1; };
  for (double& t : roots) {
    for (int it = 0; it < 8; ++it) {
      const double f = poly(t);
      const double df = dpoly(t);
      if (df == 0.0 || std::abs(f) <= 1e-12 * scale) break;
      t -= f / df;
    }
  }
  std::sort(roots.begin(), roots.end(), std::greater<double>());
  return roots;
}

/// Globally optimal step triple via the cubic whose coefficients are built
/// from the weighted power sums; any permutation of the roots is optimal.
/// Returned largest first. Requires three distinct active modes; with fewer,
/// cascades to the two-step (then one-step) solutions.
inline std::array<double, 3> three_step_optimal(const EigenReduction& red) {
  const auto modes = detail::merged_active_modes(red);
  if (modes.empty())
    throw std::invalid_argument("three-step solution undefined: all weights zero");

  auto cascade = [&]() -> std::array<double, 3> {
    const auto pair = two_step_optimal(red);
    const EigenReduction next =
        propagate_weights(red, {pair[0], pair[1]});
    const auto mn = MomentCoefficients::from(next);
    const double t3 = mn.b > 0.0 ? mn.a / mn.b : pair[0];
    std::array<double, 3> out{pair[0], pair[1], t3};
    std::sort(out.begin(), out.end(), std::greater<double>());
    return out;
  };
  if (modes.size() < 3) return cascade();

  const auto m = MomentCoefficients::from(red);
  const double a = m.a, b = m.b, c = m.c, d = m.d, e = m.e, f = m.f;
  const double d0 = a * c * e - b * b * e - a * d * d + 2.0 * b * c * d - c * c * c;
  const double d1 = c * c * d - b * d * d - b * c * e + a * d * e + b * b * f - a * c * f;
  const double d2 = -c * d * d + c * c * e + b * d * e - a * e * e - b * c * f + a * d * f;
  const double d3 = d * d * d - 2.0 * c * d * e + b * e * e + c * c * f - b * d * f;

  const auto roots = solve_cubic_real(d3, d2, d1, d0);
  if (roots.size() < 3) return cascade();
  return {roots[0], roots[1], roots[2]};
}

}  // namespace schedopt
