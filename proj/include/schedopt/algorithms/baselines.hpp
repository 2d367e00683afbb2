#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "schedopt/schedule.hpp"
#include "schedopt/trace.hpp"

namespace schedopt {

enum class BaselineKind {
  kConstantGd,       // step 2/(L+mu) when strongly convex, else 1/L
  kNesterovSc,
  kNesterovSmooth,
  kFista,
  kConjugateGradient,
  kSilverSc,
  kSilverSmooth,
  kChebyshev,
};

inline std::string baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kConstantGd: return "vanilla_gd";
    case BaselineKind::kNesterovSc: return "nesterov_sc";
    case BaselineKind::kNesterovSmooth: return "nesterov_smooth";
    case BaselineKind::kFista: return "fista";
    case BaselineKind::kConjugateGradient: return "conjugate_gradient";
    case BaselineKind::kSilverSc: return "silver_sc";
    case BaselineKind::kSilverSmooth: return "silver_smooth";
    case BaselineKind::kChebyshev: return "chebyshev";
  }
  return "unknown";
}

/// Reciprocal shifted-Chebyshev roots on [mu, L]:
///   beta_l = 1 / ((L+mu)/2 + (L-mu)/2 * cos((2l+1) pi / (2B))),  l = 0..B-1.
/// The resulting polynomial prod (1 - beta_l lambda) equioscillates on the
/// interval, and reordering the steps leaves its worst case unchanged.
inline std::vector<double> chebyshev_steps(double mu, double L, int count) {
  if (!(0.0 < mu && mu <= L) || count < 1)
    throw std::invalid_argument("chebyshev_steps: need 0 < mu <= L, count >= 1");
  std::vector<double> steps(static_cast<std::size_t>(count));
  for (int l = 0; l < count; ++l) {
    const double angle = (2.0 * l + 1.0) * M_PI / (2.0 * count);
    steps[static_cast<std::size_t>(l)] =
        1.0 / (0.5 * (L + mu) + 0.5 * (L - mu) * std::cos(angle));
  }
  return steps;
}

/// Dimensionless silver schedule for strongly convex problems with condition
/// number kappa. The recursion doubles the schedule:
///   u_1 = v_1 = 1/kappa,
///   u_k = v_{k/2} / (xi + sqrt(1 + xi^2)),  v_k = v_{k/2} (xi + sqrt(1 + xi^2)),
///   xi  = 1 - v_{k/2},
///   a_k = psi(u_k), b_k = psi(v_k),  psi(t) = (1 + kappa t) / (1 + t),
///   h^(k) = (h~^(k/2), a_k, h~^(k/2), b_k)   (h~ drops the final step).
/// Non-dyadic lengths truncate the next power of two. Steps are in units of
/// 1/L; multiply by 1/L to use them.
inline std::vector<double> silver_schedule_sc(double kappa, int length) {
  if (kappa <= 1.0) throw std::invalid_argument("silver schedule requires kappa > 1");
  if (length < 1) throw std::invalid_argument("silver schedule length must be >= 1");

  int pow2 = 1;
  while (pow2 < length) pow2 *= 2;

  const auto psi = [kappa](double t) { return (1.0 + kappa * t) / (1.0 + t); };

  double v = 1.0 / kappa;  // v_1
  std::vector<double> h{psi(v)};  // h^(1) = (a_1), a_1 = psi(u_1) = psi(v_1)
  for (int k = 2; k <= pow2; k *= 2) {
    const double xi = 1.0 - v;
    const double grow = xi + std::sqrt(1.0 + xi * xi);
    const double u_k = v / grow;
    const double v_k = v * grow;
    std::vector<double> next(h.begin(), h.end() - 1);
    next.push_back(psi(u_k));
    next.insert(next.end(), h.begin(), h.end() - 1);
    next.push_back(psi(v_k));
    h = std::move(next);
    v = v_k;
  }
  h.resize(static_cast<std::size_t>(length));
  return h;
}

inline std::vector<double> silver_steps_sc(double L, double mu, int length) {
  auto h = silver_schedule_sc(L / mu, length);
  for (double& s : h) s /= L;
  return h;
}

/// Dimensionless silver schedule for smooth convex problems, length 2^k - 1:
///   h_1 = (sqrt(2)),   h_{2K+1} = (h_K, 1 + rho^(j-1), h_K)  for K = 2^j - 1,
/// with rho = 1 + sqrt(2). Steps are in units of 1/L.
inline std::vector<double> silver_schedule_smooth(int k) {
  if (k < 1) throw std::invalid_argument("silver smooth schedule requires k >= 1");
  const double rho = 1.0 + std::sqrt(2.0);
  std::vector<double> h{std::sqrt(2.0)};
  for (int j = 2; j <= k; ++j) {
    std::vector<double> next = h;
    next.push_back(1.0 + std::pow(rho, j - 2));
    next.insert(next.end(), h.begin(), h.end());
    h = std::move(next);
  }
  return h;
}

inline std::vector<double> silver_steps_smooth(double L, int length) {
  int k = 1;
  while ((1 << k) - 1 < length) ++k;
  auto h = silver_schedule_smooth(k);
  h.resize(static_cast<std::size_t>(length));
  for (double& s : h) s /= L;
  return h;
}

/// Solution of the training instance whose parameter is closest to the query
/// in Euclidean norm; ties break toward the lowest index.
inline Eigen::VectorXd nearest_neighbor_warmstart(
    const std::vector<Eigen::VectorXd>& train_params,
    const std::vector<Eigen::VectorXd>& train_solutions,
    const Eigen::VectorXd& query) {
  if (train_params.empty() || train_params.size() != train_solutions.size())
    throw std::invalid_argument("nearest neighbor: empty or mismatched training set");
  std::size_t best = 0;
  double best_dist = (train_params[0] - query).norm();
  for (std::size_t i = 1; i < train_params.size(); ++i) {
    const double d = (train_params[i] - query).norm();
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return train_solutions[best];
}

/// Non-learned reference methods and the constants they derive their steps
/// from.
struct BaselineSchedule {
  BaselineKind kind = BaselineKind::kConstantGd;
  double smoothness = 0.0;        // L
  double strong_convexity = 0.0;  // mu_sc
  int chebyshev_block = 1;

  double condition_number() const { return smoothness / strong_convexity; }

  /// Derived gradient-step sequence for the step-based kinds.
  std::vector<double> steps(int count) const {
    switch (kind) {
      case BaselineKind::kConstantGd: {
        const double s = strong_convexity > 0.0
                             ? 2.0 / (smoothness + strong_convexity)
                             : 1.0 / smoothness;
        return std::vector<double>(static_cast<std::size_t>(count), s);
      }
      case BaselineKind::kSilverSc:
        return silver_steps_sc(smoothness, strong_convexity, count);
      case BaselineKind::kSilverSmooth:
        return silver_steps_smooth(smoothness, count);
      case BaselineKind::kChebyshev: {
        const auto block = chebyshev_steps(strong_convexity, smoothness,
                                           chebyshev_block);
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) out.push_back(block[i % block.size()]);
        return out;
      }
      default:
        throw std::invalid_argument("baseline has no explicit step sequence");
    }
  }

  /// Step-based kinds in the common schedule format (all step-varying, with
  /// the safe constant step as steady state).
  Schedule to_schedule(int count, const std::string& algorithm) const {
    const double steady = strong_convexity > 0.0
                              ? 2.0 / (smoothness + strong_convexity)
                              : 1.0 / smoothness;
    return Schedule::from_steps(algorithm, steps(count), steady);
  }
};

namespace detail {

template <class Family>
concept HasLinearSystem = requires(const Family& f, const Eigen::VectorXd& x) {
  f.linear_system(x);
};

template <class Family>
concept HasProx = requires(const Family& f, const Eigen::VectorXd& v, double t) {
  { f.prox(v, t) } -> std::convertible_to<Eigen::VectorXd>;
};

}  // namespace detail

/// Runs a baseline from z0 (zero unless warm-started) and records the main
/// iterate sequence. Momentum methods initialize their auxiliary sequence at
/// the starting point.
template <class Family>
IterateTrace run_baseline(const BaselineSchedule& spec, const Family& family,
                          const Eigen::VectorXd& x, int k_eval,
                          std::optional<Eigen::VectorXd> z0 = std::nullopt) {
  const int n = family.dim();
  Eigen::VectorXd z = z0 ? *z0 : Eigen::VectorXd::Zero(n);
  IterateTrace trace;
  trace.iterates.reserve(static_cast<std::size_t>(k_eval) + 1);
  trace.iterates.push_back(z);

  const double L = spec.smoothness;
  const double mu = spec.strong_convexity;

  switch (spec.kind) {
    case BaselineKind::kConstantGd:
    case BaselineKind::kSilverSc:
    case BaselineKind::kSilverSmooth:
    case BaselineKind::kChebyshev: {
      const auto steps = spec.steps(k_eval);
      for (int k = 0; k < k_eval; ++k) {
        z -= steps[static_cast<std::size_t>(k)] * family.gradient(z, x);
        trace.iterates.push_back(z);
      }
      break;
    }
    case BaselineKind::kNesterovSc: {
      if (mu <= 0.0)
        throw std::invalid_argument("strongly convex Nesterov needs mu > 0");
      const double step = 4.0 / (3.0 * L + mu);
      const double root = std::sqrt(3.0 * L / mu + 1.0);
      const double momentum = (root - 2.0) / (root + 2.0);
      Eigen::VectorXd y = z;
      for (int k = 0; k < k_eval; ++k) {
        const Eigen::VectorXd y_next = z - step * family.gradient(z, x);
        z = y_next + momentum * (y_next - y);
        y = y_next;
        trace.iterates.push_back(z);
      }
      break;
    }
    case BaselineKind::kNesterovSmooth: {
      Eigen::VectorXd y = z;
      for (int k = 0; k < k_eval; ++k) {
        const Eigen::VectorXd y_next = z - (1.0 / L) * family.gradient(z, x);
        z = y_next + (static_cast<double>(k) / (k + 3.0)) * (y_next - y);
        y = y_next;
        trace.iterates.push_back(z);
      }
      break;
    }
    case BaselineKind::kFista: {
      if constexpr (detail::HasProx<Family>) {
        Eigen::VectorXd y_prev = z;
        double t = 1.0;
        for (int k = 0; k < k_eval; ++k) {
          const Eigen::VectorXd y =
              family.prox(z - (1.0 / L) * family.gradient(z, x), 1.0 / L);
          const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
          z = y + ((t - 1.0) / t_next) * (y - y_prev);
          y_prev = y;
          t = t_next;
          trace.iterates.push_back(z);
        }
      } else {
        throw std::invalid_argument("FISTA requires a proximal family");
      }
      break;
    }
    case BaselineKind::kConjugateGradient: {
      if constexpr (detail::HasLinearSystem<Family>) {
        const auto [G, h] = family.linear_system(x);
        Eigen::VectorXd r = h - G * z;
        Eigen::VectorXd p = r;
        double rr = r.squaredNorm();
        for (int k = 0; k < k_eval; ++k) {
          if (rr > 1e-300) {
            const Eigen::VectorXd Gp = G * p;
            const double alpha = rr / p.dot(Gp);
            z += alpha * p;
            r -= alpha * Gp;
            const double rr_next = r.squaredNorm();
            p = r + (rr_next / rr) * p;
            rr = rr_next;
          }
          trace.iterates.push_back(z);
        }
      } else {
        throw std::invalid_argument("conjugate gradient requires a quadratic family");
      }
      break;
    }
  }
  return trace;
}

}  // namespace schedopt
