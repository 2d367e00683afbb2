#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "schedopt/operators.hpp"
#include "schedopt/schedule.hpp"
#include "schedopt/train/reparam.hpp"

namespace schedopt {

/// Parametric box-constrained QP
///   min (1/2) w' P w + c(x)' w   s.t.  l <= A w <= u,
/// with c(x) = cost_offset + cost_map * x. P, A, l, u are shared across all
/// instances of a family; rows with l == u count as equalities and must come
/// first.
struct QpData {
  Eigen::MatrixXd cost_matrix;        // P, q x q symmetric PSD
  Eigen::MatrixXd constraint_matrix;  // A, m x q
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  int num_equalities = 0;
  Eigen::MatrixXd cost_map;
  Eigen::VectorXd cost_offset;

  int q() const { return static_cast<int>(cost_matrix.rows()); }
  int m() const { return static_cast<int>(constraint_matrix.rows()); }
  int state_dim() const { return q() + m(); }

  Eigen::VectorXd linear_cost(const Eigen::VectorXd& x) const {
    return cost_offset + cost_map * x;
  }

  /// Per-row penalty vector: rho_eq on the equality rows, rho_ineq elsewhere.
  Eigen::VectorXd rho_vector(double rho_eq, double rho_ineq) const {
    Eigen::VectorXd rho = Eigen::VectorXd::Constant(m(), rho_ineq);
    rho.head(num_equalities).setConstant(rho_eq);
    return rho;
  }

  void validate() const {
    if (cost_matrix.rows() != cost_matrix.cols())
      throw std::invalid_argument("cost matrix must be square");
    if (!cost_matrix.isApprox(cost_matrix.transpose(), 1e-9))
      throw std::invalid_argument("cost matrix must be symmetric");
    if (constraint_matrix.cols() != cost_matrix.rows())
      throw std::invalid_argument("constraint matrix has wrong column count");
    if (lower.size() != m() || upper.size() != m())
      throw std::invalid_argument("bound vectors have wrong size");
    if (((upper - lower).array() < 0.0).any())
      throw std::invalid_argument("bounds violate l <= u");
    for (int i = 0; i < m(); ++i) {
      const bool eq = lower[i] == upper[i];
      if (eq != (i < num_equalities))
        throw std::invalid_argument("equality rows must be exactly the leading rows");
    }
  }
};

inline Eigen::VectorXd box_project(const Eigen::VectorXd& v,
                                   const Eigen::VectorXd& l,
                                   const Eigen::VectorXd& u) {
  return v.cwiseMax(l).cwiseMin(u);
}

/// Fixed-point state (w, xi); xi is the splitting variable whose projection
/// gives the constraint iterate v and whose scaled residual gives the dual y.
struct QpIterate {
  Eigen::VectorXd w;
  Eigen::VectorXd xi;

  static QpIterate from_state(const Eigen::VectorXd& z, int q) {
    return {z.head(q), z.tail(z.size() - q)};
  }
  Eigen::VectorXd to_state() const {
    Eigen::VectorXd z(w.size() + xi.size());
    z << w, xi;
    return z;
  }
};

struct QpResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double max() const { return primal > dual ? primal : dual; }
};

/// Residuals at (w, xi): with v = Pi(xi) and y = rho .* (xi - v),
/// primal = ||A w - v||_2 and dual = ||P w + A' y + c(x)||_2.
inline QpResiduals qp_residuals(const QpData& qp, const Eigen::VectorXd& w,
                                const Eigen::VectorXd& xi,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& rho) {
  const Eigen::VectorXd v = box_project(xi, qp.lower, qp.upper);
  const Eigen::VectorXd y = rho.cwiseProduct(xi - v);
  QpResiduals r;
  r.primal = (qp.constraint_matrix * w - v).norm();
  r.dual = (qp.cost_matrix * w + qp.constraint_matrix.transpose() * y +
            qp.linear_cost(x))
               .norm();
  return r;
}

/// Cache of KKT-matrix factorizations Q(theta) = P + sigma I + A' diag(rho) A,
/// one per distinct (sigma, rho_eq, rho_ineq) in a schedule. Prepared offline;
/// read-only afterwards, so runs on any number of instances perform no
/// further factorizations.
class FactorizationCache {
 public:
  using Key = std::array<double, 3>;  // (sigma, rho_eq, rho_ineq)

  static Key key_of(const Eigen::VectorXd& theta) {
    return {theta[0], theta[1], theta[2]};
  }

  const Eigen::LDLT<Eigen::MatrixXd>* find(const Key& key) const {
    auto it = handles_.find(key);
    return it == handles_.end() ? nullptr : &it->second;
  }

  /// Total factorizations performed while building the cache; never changes
  /// afterwards.
  long factorization_count() const { return count_; }
  int size() const { return static_cast<int>(handles_.size()); }

  void add(const Key& key, const QpData& qp) {
    if (handles_.count(key)) return;
    Eigen::MatrixXd Q = qp.cost_matrix;
    Q.diagonal().array() += key[0];
    const Eigen::VectorXd rho = qp.rho_vector(key[1], key[2]);
    Q.noalias() += qp.constraint_matrix.transpose() * rho.asDiagonal() *
                   qp.constraint_matrix;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Q);
    ++count_;
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw std::runtime_error("KKT matrix factorization failed (singular Q)");
    handles_.emplace(key, std::move(ldlt));
  }

 private:
  std::map<Key, Eigen::LDLT<Eigen::MatrixXd>> handles_;
  long count_ = 0;
};

/// Factors Q(theta) for every step of the schedule (H step-varying entries
/// plus the steady state), deduplicating identical penalty triples.
inline FactorizationCache prepare_factorizations(const Schedule& sched,
                                                 const QpData& qp) {
  if (sched.arity != 4)
    throw std::invalid_argument("QP schedules carry (sigma, rho_eq, rho_ineq, alpha)");
  FactorizationCache cache;
  for (int k = 0; k <= sched.horizon(); ++k)
    cache.add(FactorizationCache::key_of(sched.params_at(k)), qp);
  return cache;
}

/// Operator-splitting QP step with hyperparameters
/// theta = (sigma, rho_eq, rho_ineq, alpha):
///
///   v      = Pi_[l,u](xi)
///   solve    Q w~ = sigma w - c(x) + A'(rho .* (2 v - xi)),
///            Q = P + sigma I + A' diag(rho) A
///   w+     = alpha w~ + (1 - alpha) w
///   xi+    = xi + alpha (A w~ - v)
///
/// With alpha = 1 this is the unrelaxed recursion; fixed points are KKT
/// points of the QP. When a FactorizationCache is bound, the solve uses the
/// cached handle and a missing triple is an error, which guarantees that no
/// factorization happens while instances are being solved. Without a cache
/// (training), factorizations are memoized internally per penalty triple.
class AdmmQp {
 public:
  explicit AdmmQp(QpData qp)
      : qp_(std::move(qp)), memo_(std::make_shared<Memo>()) {
    qp_.validate();
  }

  int dim() const { return qp_.state_dim(); }
  int arity() const { return 4; }
  const QpData& qp() const { return qp_; }

  void bind_cache(const FactorizationCache* cache) { cache_ = cache; }

  Eigen::VectorXd step(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& theta) const {
    const int q = qp_.q();
    const int m = qp_.m();
    const auto w = z.head(q);
    const auto xi = z.tail(m);
    const double sigma = theta[0];
    const double alpha = theta[3];
    const Eigen::VectorXd rho = qp_.rho_vector(theta[1], theta[2]);

    const Eigen::VectorXd v = box_project(xi, qp_.lower, qp_.upper);
    const Eigen::VectorXd rhs =
        sigma * w - qp_.linear_cost(x) +
        qp_.constraint_matrix.transpose() * rho.cwiseProduct(2.0 * v - xi);
    const Eigen::VectorXd w_hat = solve(theta, rhs);

    Eigen::VectorXd out(q + m);
    out.head(q) = alpha * w_hat + (1.0 - alpha) * w;
    out.tail(m) = xi + alpha * (qp_.constraint_matrix * w_hat - v);
    return out;
  }

  StepVjp step_vjp(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& grad_out) const {
    const int q = qp_.q();
    const int m = qp_.m();
    const auto w = z.head(q);
    const auto xi = z.tail(m);
    const double sigma = theta[0];
    const double alpha = theta[3];
    const Eigen::VectorXd rho = qp_.rho_vector(theta[1], theta[2]);
    const auto& A = qp_.constraint_matrix;

    // Recompute the forward pass.
    const Eigen::VectorXd v = box_project(xi, qp_.lower, qp_.upper);
    const Eigen::VectorXd spread = 2.0 * v - xi;
    const Eigen::VectorXd rhs =
        sigma * w - qp_.linear_cost(x) + A.transpose() * rho.cwiseProduct(spread);
    const Eigen::VectorXd w_hat = solve(theta, rhs);
    const Eigen::VectorXd Aw_hat = A * w_hat;

    const auto gw = grad_out.head(q);
    const auto gxi_out = grad_out.tail(m);

    // Interior mask of the projection; the boundary kink takes the zero side.
    Eigen::ArrayXd mask(m);
    for (int i = 0; i < m; ++i)
      mask[i] = (xi[i] > qp_.lower[i] && xi[i] < qp_.upper[i]) ? 1.0 : 0.0;

    const double g_alpha = gw.dot(w_hat - w) + gxi_out.dot(Aw_hat - v);
    const Eigen::VectorXd g_w_hat = alpha * (gw + A.transpose() * gxi_out);
    const Eigen::VectorXd s = solve(theta, g_w_hat);  // Q is symmetric
    const Eigen::VectorXd As = A * s;

    const double g_sigma = s.dot(w - w_hat);
    const Eigen::VectorXd row_term = As.cwiseProduct(spread - Aw_hat);
    const double g_rho_eq = row_term.head(qp_.num_equalities).sum();
    const double g_rho_ineq = row_term.tail(m - qp_.num_equalities).sum();

    const Eigen::VectorXd t = rho.cwiseProduct(As);
    const Eigen::VectorXd g_v = 2.0 * t - alpha * gxi_out;

    StepVjp r;
    r.grad_state.resize(q + m);
    r.grad_state.head(q) = sigma * s + (1.0 - alpha) * gw;
    r.grad_state.tail(m) =
        gxi_out - t + (mask * g_v.array()).matrix();
    r.grad_theta.resize(4);
    r.grad_theta << g_sigma, g_rho_eq, g_rho_ineq, g_alpha;
    return r;
  }

  ValidityReport check_steady_state(const Eigen::VectorXd& theta) const {
    ValidityReport rep;
    rep.checks.push_back({"sigma > 0", theta[0] > 0.0, theta[0]});
    rep.checks.push_back({"rho_eq > 0", theta[1] > 0.0, theta[1]});
    rep.checks.push_back({"rho_ineq > 0", theta[2] > 0.0, theta[2]});
    rep.checks.push_back({"1 < alpha", theta[3] > 1.0, theta[3]});
    rep.checks.push_back({"alpha < 2", theta[3] < 2.0, theta[3]});
    rep.ok = true;
    for (const auto& c : rep.checks) rep.ok = rep.ok && c.ok;
    return rep;
  }

  Eigen::VectorXd fallback_params() const {
    Eigen::VectorXd t(4);
    t << 1e-6, 100.0, 0.1, 1.6;
    return t;
  }

  std::vector<ReparamSpec> step_reparams() const {
    return {ReparamSpec::positive(), ReparamSpec::positive(),
            ReparamSpec::positive(), ReparamSpec::range(0.0, 2.0)};
  }
  std::vector<ReparamSpec> steady_reparams() const {
    return {ReparamSpec::positive(), ReparamSpec::positive(),
            ReparamSpec::positive(), ReparamSpec::range(1.0, 2.0)};
  }

  /// Only the primal block enters the training loss; the splitting block has
  /// no penalty-independent ground truth.
  Eigen::VectorXd loss_mask() const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(dim());
    m.head(qp_.q()).setOnes();
    return m;
  }

 private:
  struct Memo {
    std::mutex mutex;
    std::map<FactorizationCache::Key, Eigen::LDLT<Eigen::MatrixXd>> handles;
  };

  Eigen::VectorXd solve(const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& rhs) const {
    const auto key = FactorizationCache::key_of(theta);
    if (cache_) {
      const auto* handle = cache_->find(key);
      if (!handle)
        throw std::runtime_error(
            "factorization cache miss: schedule step not prepared");
      return handle->solve(rhs);
    }
    std::lock_guard<std::mutex> lock(memo_->mutex);
    auto it = memo_->handles.find(key);
    if (it == memo_->handles.end()) {
      if (memo_->handles.size() > 256) memo_->handles.clear();
      Eigen::MatrixXd Q = qp_.cost_matrix;
      Q.diagonal().array() += key[0];
      const Eigen::VectorXd rho = qp_.rho_vector(key[1], key[2]);
      Q.noalias() += qp_.constraint_matrix.transpose() * rho.asDiagonal() *
                     qp_.constraint_matrix;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(Q);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw std::runtime_error("KKT matrix factorization failed (singular Q)");
      it = memo_->handles.emplace(key, std::move(ldlt)).first;
    }
    return it->second.solve(rhs);
  }

  QpData qp_;
  const FactorizationCache* cache_ = nullptr;
  std::shared_ptr<Memo> memo_;
};

/// Assembles the fixed-point state (w*, xi*) of a solved QP for a given
/// penalty choice: with v* = A w*, the splitting variable is
/// xi* = v* + y* ./ rho.
inline Eigen::VectorXd qp_state_from_solution(const QpData& qp,
                                              const Eigen::VectorXd& w_star,
                                              const Eigen::VectorXd& y_star,
                                              double rho_eq, double rho_ineq) {
  const Eigen::VectorXd v = qp.constraint_matrix * w_star;
  const Eigen::VectorXd rho = qp.rho_vector(rho_eq, rho_ineq);
  Eigen::VectorXd state(qp.state_dim());
  state << w_star, v + (y_star.array() / rho.array()).matrix();
  return state;
}

/// Residual metric series for a trace of (w, xi) states. Iterate k > 0 uses
/// the penalties consumed by the step that produced it.
inline std::vector<double> residual_series(const QpData& qp,
                                           const std::vector<Eigen::VectorXd>& iterates,
                                           const Eigen::VectorXd& x,
                                           const Schedule& sched) {
  std::vector<double> out;
  out.reserve(iterates.size());
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    const auto& theta = sched.params_at(k == 0 ? 0 : static_cast<int>(k) - 1);
    const auto it = QpIterate::from_state(iterates[k], qp.q());
    out.push_back(
        qp_residuals(qp, it.w, it.xi, x, qp.rho_vector(theta[1], theta[2])).max());
  }
  return out;
}

}  // namespace schedopt
