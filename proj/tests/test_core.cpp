// Unit tests for the two-phase run engine, metric evaluation, schedule
// serialization, and steady-state validity checks.

#include <gtest/gtest.h>

#include <cstdio>

#include <Eigen/Dense>

#include "schedopt/algorithms/admm_qp.hpp"
#include "schedopt/algorithms/gradient_descent.hpp"
#include "schedopt/evaluation.hpp"
#include "schedopt/metrics.hpp"
#include "schedopt/problems/quadratic.hpp"
#include "schedopt/problems/ridge.hpp"
#include "schedopt/problems/streams.hpp"
#include "schedopt/rng.hpp"
#include "schedopt/schedule.hpp"
#include "schedopt/trace.hpp"

using namespace schedopt;

namespace {

// Wraps an operator and records every hyperparameter vector it consumes.
template <class Op>
struct RecordingOp {
  const Op& inner;
  mutable std::vector<Eigen::VectorXd> consumed;

  int dim() const { return inner.dim(); }
  int arity() const { return inner.arity(); }
  Eigen::VectorXd step(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& theta) const {
    consumed.push_back(theta);
    return inner.step(z, x, theta);
  }
};

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST(RunScheduled, OneStepAnnihilatesScalarQuadratic) {
  QuadraticFamily fam(Eigen::MatrixXd::Identity(1, 1));
  GradientDescent op(fam);
  const Schedule sched = Schedule::from_steps("gradient_descent", {1.0}, 0.5);
  const Eigen::VectorXd x = scalar(1.0);

  IterateTrace trace = run_scheduled(op, sched, x, 1);
  EXPECT_DOUBLE_EQ(trace.iterates[1][0], -1.0);
  const auto sub = suboptimality_series(fam, trace, x);
  EXPECT_NEAR(sub[1], 0.0, 1e-15);
}

TEST(RunScheduled, ZeroIterationsYieldsOnlyInitialPoint) {
  QuadraticFamily fam(Eigen::MatrixXd::Identity(3, 3));
  GradientDescent op(fam);
  const Schedule sched = Schedule::constant("gradient_descent", scalar(0.5));
  const IterateTrace trace =
      run_scheduled(op, sched, Eigen::VectorXd::Ones(3), 0);
  ASSERT_EQ(trace.length(), 1);
  EXPECT_TRUE(trace.iterates[0].isZero());
}

TEST(RunScheduled, MatchesHandUnrolledPhaseSwitch) {
  Eigen::MatrixXd P = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  QuadraticFamily fam(P);
  GradientDescent op(fam);
  Schedule sched = Schedule::from_steps("gradient_descent", {0.1, 0.2}, 0.3);
  const Eigen::VectorXd x = Eigen::Vector2d(1.0, 1.0);

  const IterateTrace trace = run_scheduled(op, sched, x, 3);

  // Step 2 is already in the steady-state phase (H = 2).
  const Eigen::VectorXd z_star = fam.solve(x);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd expected =
      (I - 0.3 * P) * (I - 0.2 * P) * (I - 0.1 * P) * (-z_star) + z_star;
  EXPECT_LT((trace.iterates[3] - expected).norm(), 1e-14);
}

TEST(RunScheduled, ConsumesSteadyStateFromHorizonOnwards) {
  QuadraticFamily fam(Eigen::MatrixXd::Identity(2, 2) * 2.0);
  GradientDescent op(fam);
  RecordingOp<decltype(op)> rec{op, {}};
  Schedule sched = Schedule::from_steps("gradient_descent", {0.9, 0.8, 0.7}, 0.4);
  sched.train_horizon = 10;

  run_scheduled(rec, sched, Eigen::Vector2d(1.0, -1.0), 25);
  ASSERT_EQ(rec.consumed.size(), 25u);
  for (int k = 0; k < 25; ++k) {
    const double expected = k < 3 ? sched.step_varying[k][0] : 0.4;
    // Bitwise equality: the steady-state entry itself must be consumed.
    EXPECT_EQ(rec.consumed[k][0], expected) << "at step " << k;
  }
}

TEST(RunScheduled, DimensionMismatchThrows) {
  QuadraticFamily fam(Eigen::MatrixXd::Identity(2, 2));
  GradientDescent op(fam);
  const Schedule sched = Schedule::constant("gradient_descent", scalar(0.5));
  EXPECT_THROW(
      run_scheduled(op, sched, Eigen::Vector2d(0, 0), 1, Eigen::VectorXd::Zero(3)),
      std::invalid_argument);
}

TEST(RunScheduled, NonFiniteIterateReportsFirstOffendingStep) {
  QuadraticFamily fam(Eigen::MatrixXd::Identity(1, 1));
  GradientDescent op(fam);
  // Enormous steps blow the iterate up past double range quickly.
  const Schedule sched = Schedule::constant("gradient_descent", scalar(1e308));
  try {
    run_scheduled(op, sched, scalar(1.0), 50);
    FAIL() << "expected NonFiniteIterateError";
  } catch (const NonFiniteIterateError& e) {
    EXPECT_GE(e.step(), 1);
    EXPECT_LT(e.step(), 10);
  }
}

TEST(RunScheduled, DeterministicTraces) {
  Rng rng(7);
  Eigen::MatrixXd B = rng.normal_matrix(4, 4);
  QuadraticFamily fam(B * B.transpose() + 0.5 * Eigen::MatrixXd::Identity(4, 4));
  GradientDescent op(fam);
  const Schedule sched =
      Schedule::from_steps("gradient_descent", {0.3, 0.01, 0.7}, 0.1);
  const Eigen::VectorXd x = rng.normal_vector(4);

  const IterateTrace a = run_scheduled(op, sched, x, 40);
  const IterateTrace b = run_scheduled(op, sched, x, 40);
  for (int k = 0; k <= 40; ++k)
    EXPECT_TRUE(a.iterates[k] == b.iterates[k]) << "step " << k;
}

TEST(RunScheduled, AdversarialPrefixStillConvergesUnderValidSteadyState) {
  Rng rng(21);
  Eigen::MatrixXd B = rng.normal_matrix(6, 6);
  QuadraticFamily fam(B * B.transpose() + Eigen::MatrixXd::Identity(6, 6));
  GradientDescent op(fam);

  const double L = fam.smoothness();
  std::vector<double> wild(20);
  for (double& s : wild) s = rng.uniform(0.0, 100.0 / L);
  Schedule sched = Schedule::from_steps("gradient_descent", wild,
                                        2.0 / (L + fam.strong_convexity()));
  ASSERT_TRUE(op.check_steady_state(sched.steady_state).ok);

  const Eigen::VectorXd x = rng.normal_vector(6);
  IterateTrace trace = run_scheduled(op, sched, x, 20 + 5000);
  const auto sub = suboptimality_series(fam, trace, x);
  EXPECT_LT(sub.back(), 1e-8);
}

TEST(EvaluateMetric, RidgeSuboptimalityFromZeroMatchesClosedForm) {
  const auto fam = RidgeFamily::generate(8, 12, 0.05, 3);
  const Eigen::VectorXd x = fam.parameter(kTestStream, 0);
  const Eigen::VectorXd z_star = fam.solve(x);

  GradientDescent op(fam);
  IterateTrace trace = run_scheduled(
      op, Schedule::constant("gradient_descent", scalar(1.0 / fam.smoothness())),
      x, 0);
  const auto sub = suboptimality_series(fam, trace, x);
  const double expected = fam.objective(Eigen::VectorXd::Zero(12), x) -
                          fam.objective(z_star, x);
  EXPECT_NEAR(sub[0], expected, 1e-12 * std::abs(expected) + 1e-12);
  EXPECT_GE(sub[0], 0.0);
}

TEST(EvaluateMetric, SuboptimalitySeriesNonNegativeUpToSlack) {
  const auto fam = RidgeFamily::generate(10, 15, 0.1, 11);
  GradientDescent op(fam);
  const Eigen::VectorXd x = fam.parameter(kTestStream, 4);
  Schedule sched = Schedule::from_steps(
      "gradient_descent", {0.9 / fam.smoothness(), 1.7 / fam.smoothness()},
      1.0 / fam.smoothness());
  IterateTrace trace = run_scheduled(op, sched, x, 400);
  for (double v : suboptimality_series(fam, trace, x)) EXPECT_GE(v, -1e-10);
}

TEST(GeometricMean, MatchesAnalyticValues) {
  EXPECT_NEAR(geometric_mean({1.0, 100.0}), 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(geometric_mean({5.0}), 5.0);
  EXPECT_THROW(geometric_mean({}), std::invalid_argument);
}

TEST(GeometricMean, AgreesWithDirectProductAtSmallCounts) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(20);
    double product = 1.0;
    for (double& v : values) {
      v = rng.uniform(0.5, 2.0);
      product *= v;
    }
    const double direct = std::pow(product, 1.0 / 20.0);
    EXPECT_NEAR(geometric_mean(values), direct, 1e-12 * direct);
  }
}

TEST(GeometricMean, ClipsAtFloorBeforeAggregating) {
  // A converged (slightly negative) suboptimality must not poison the mean.
  const double v = geometric_mean({-1e-13, 1.0});
  EXPECT_NEAR(v, std::sqrt(1e-12), 1e-18);
}

TEST(SteadyStateValidity, GradientDescentWindow) {
  QuadraticFamily fam(Eigen::MatrixXd::Identity(2, 2) * 2.0);  // L = 2
  GradientDescent op(fam);
  EXPECT_TRUE(op.check_steady_state(scalar(0.5)).ok);
  const auto report = op.check_steady_state(scalar(1.0));  // 2/L boundary
  EXPECT_FALSE(report.ok);
  EXPECT_FALSE(report.checks[1].ok);
  EXPECT_FALSE(op.check_steady_state(scalar(0.0)).ok);
}

TEST(SteadyStateValidity, AdmmPenaltiesAndRelaxation) {
  QpData qp;
  qp.cost_matrix = Eigen::MatrixXd::Identity(1, 1);
  qp.constraint_matrix = Eigen::MatrixXd::Identity(1, 1);
  qp.lower = Eigen::VectorXd::Constant(1, 1.0);
  qp.upper = Eigen::VectorXd::Constant(1, 1.0);
  qp.num_equalities = 1;
  qp.cost_map = Eigen::MatrixXd::Zero(1, 1);
  qp.cost_offset = Eigen::VectorXd::Zero(1);
  AdmmQp op(qp);

  Eigen::VectorXd theta(4);
  theta << 1e-6, 0.1, 0.1, 1.6;
  EXPECT_TRUE(op.check_steady_state(theta).ok);
  theta[3] = 1.0;
  EXPECT_FALSE(op.check_steady_state(theta).ok);
  theta << -1.0, 0.1, 0.1, 1.6;
  EXPECT_FALSE(op.check_steady_state(theta).ok);
}

TEST(Schedule, JsonRoundTripIsExact) {
  Schedule sched;
  sched.algorithm = "admm_qp";
  sched.arity = 4;
  Rng rng(9);
  for (int k = 0; k < 7; ++k) {
    Eigen::VectorXd t = rng.normal_vector(4).array().exp();
    sched.step_varying.push_back(t);
  }
  sched.steady_state = rng.normal_vector(4).array().exp();
  sched.steady_state[3] = 1.5;
  sched.train_horizon = 12;
  sched.validate();

  const Schedule back = Schedule::from_json(sched.to_json());
  ASSERT_EQ(back.horizon(), sched.horizon());
  EXPECT_EQ(back.train_horizon, 12);
  EXPECT_EQ(back.algorithm, "admm_qp");
  for (int k = 0; k < sched.horizon(); ++k)
    EXPECT_TRUE(back.step_varying[k] == sched.step_varying[k]);
  EXPECT_TRUE(back.steady_state == sched.steady_state);
}

TEST(Schedule, ValidationRejectsBadShapes) {
  Schedule sched = Schedule::from_steps("gradient_descent", {0.1, 0.2}, 0.3);
  sched.train_horizon = 1;  // K < H
  EXPECT_THROW(sched.validate(), std::invalid_argument);

  Schedule ragged = Schedule::from_steps("gradient_descent", {0.1}, 0.3);
  ragged.step_varying.push_back(Eigen::VectorXd::Zero(2));
  ragged.train_horizon = 2;
  EXPECT_THROW(ragged.validate(), std::invalid_argument);
}
