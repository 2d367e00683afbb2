#pragma once

#include <cmath>
#include <stdexcept>

namespace schedopt {

/// Maps a free training weight nu to a constrained hyperparameter theta:
///   Free:      theta = nu
///   Positive:  theta = exp(nu)
///   Range:     theta = (hi - lo) * sigmoid(nu) + lo
struct ReparamSpec {
  enum class Kind { kFree, kPositive, kRange };

  Kind kind = Kind::kFree;
  double lo = 0.0;
  double hi = 0.0;

  static ReparamSpec free() { return {Kind::kFree, 0.0, 0.0}; }
  static ReparamSpec positive() { return {Kind::kPositive, 0.0, 0.0}; }
  static ReparamSpec range(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("range reparam requires lo < hi");
    return {Kind::kRange, lo, hi};
  }

  double apply(double nu) const {
    switch (kind) {
      case Kind::kFree:
        return nu;
      case Kind::kPositive:
        return std::exp(nu);
      case Kind::kRange:
        return (hi - lo) / (1.0 + std::exp(-nu)) + lo;
    }
    return nu;
  }

  double inverse(double theta) const {
    switch (kind) {
      case Kind::kFree:
        return theta;
      case Kind::kPositive:
        if (theta <= 0.0)
          throw std::invalid_argument("positive reparam: theta must be > 0");
        return std::log(theta);
      case Kind::kRange: {
        if (theta <= lo || theta >= hi)
          throw std::invalid_argument("range reparam: theta outside (lo, hi)");
        const double t = (theta - lo) / (hi - lo);
        return std::log(t / (1.0 - t));
      }
    }
    return theta;
  }

  /// d theta / d nu, for chaining loss gradients onto the free weights.
  double derivative(double nu) const {
    switch (kind) {
      case Kind::kFree:
        return 1.0;
      case Kind::kPositive:
        return std::exp(nu);
      case Kind::kRange: {
        const double s = 1.0 / (1.0 + std::exp(-nu));
        return (hi - lo) * s * (1.0 - s);
      }
    }
    return 1.0;
  }
};

}  // namespace schedopt
