// Closed-form block training on quadratics: eigenbasis reductions, the
// one/two/three-step solutions against grid oracles, weight propagation,
// progressive training, and rate certificates.

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "schedopt/quadratic/closed_form.hpp"
#include "schedopt/quadratic/progressive.hpp"
#include "schedopt/quadratic/rate.hpp"
#include "schedopt/quadratic/reduction.hpp"
#include "schedopt/algorithms/baselines.hpp"
#include "schedopt/rng.hpp"
#include "support/oracles.hpp"

using namespace schedopt;

namespace {

EigenReduction make_reduction(const Eigen::VectorXd& lambdas,
                              const Eigen::VectorXd& weights) {
  EigenReduction red;
  red.eigenvalues = lambdas;
  red.basis = Eigen::MatrixXd::Identity(lambdas.size(), lambdas.size());
  red.weights = weights;
  return red;
}

Eigen::MatrixXd random_spd(Rng& rng, int n) {
  Eigen::MatrixXd B = rng.normal_matrix(n, n);
  return B * B.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST(ReduceDeterministic, EigenvectorErrorLightsUpSingleWeight) {
  Rng rng(3);
  const Eigen::MatrixXd P = random_spd(rng, 5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P);
  const int j = 2;
  const auto red = reduce_deterministic(P, {eig.eigenvectors().col(j)});
  for (int i = 0; i < 5; ++i)
    EXPECT_NEAR(red.weights[i], i == j ? 1.0 : 0.0, 1e-10);
}

TEST(ReduceDeterministic, ZeroErrorsGiveZeroWeights) {
  Rng rng(4);
  const Eigen::MatrixXd P = random_spd(rng, 4);
  const auto red =
      reduce_deterministic(P, {Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4)});
  EXPECT_DOUBLE_EQ(red.weights.maxCoeff(), 0.0);
}

TEST(ReduceDeterministic, SeparableObjectiveMatchesVectorForm) {
  Rng rng(5);
  const int n = 5, instances = 3;
  const Eigen::MatrixXd P = random_spd(rng, n);
  std::vector<Eigen::VectorXd> errors;
  for (int i = 0; i < instances; ++i) errors.push_back(rng.normal_vector(n));
  const auto red = reduce_deterministic(P, errors);

  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> steps{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
    const double separable = reduction_objective(red, steps);
    const double direct = oracles::vector_form_objective(P, errors, steps);
    EXPECT_NEAR(separable, direct, 1e-10 * std::max(1.0, direct));
  }
}

TEST(ReduceDeterministic, RejectsIndefiniteMatrix) {
  Eigen::MatrixXd M = -Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(reduce_deterministic(M, {}), std::invalid_argument);
}

TEST(ReduceGaussian, StandardNormalBaseWeightsAreInverseSquares) {
  Rng rng(6);
  const int n = 4;
  const Eigen::MatrixXd P = random_spd(rng, n);
  const GaussianParameterModel model{Eigen::VectorXd::Zero(n),
                                     Eigen::MatrixXd::Identity(n, n)};
  const auto red = reduce_gaussian(P, model);
  for (int j = 0; j < n; ++j)
    EXPECT_NEAR(red.weights[j], 1.0 / std::pow(red.eigenvalues[j], 2),
                1e-10 / std::pow(red.eigenvalues[j], 2));
}

TEST(ReduceGaussian, PointMassMatchesDeterministicSingleInstance) {
  Rng rng(7);
  const int n = 4;
  const Eigen::MatrixXd P = random_spd(rng, n);
  const Eigen::VectorXd x = rng.normal_vector(n);
  const GaussianParameterModel model{x, Eigen::MatrixXd::Zero(n, n)};
  const std::vector<double> prefix{0.3, 0.9};

  const auto gauss = reduce_gaussian(P, model, prefix);

  // z0 = 0, z* = -P^{-1} x; advance the single error through the prefix.
  Eigen::VectorXd err = P.llt().solve(x);  // z0 - z* = P^{-1} x
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (double t : prefix) err = (I - t * P) * err;
  const auto det = reduce_deterministic(P, {err});

  EXPECT_LT((gauss.weights - det.weights).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ReduceGaussian, MonteCarloAgreesWithinTwoPercent) {
  Rng rng(8);
  const int n = 4;
  const Eigen::MatrixXd P = random_spd(rng, n);
  Eigen::MatrixXd S = rng.normal_matrix(n, n);
  const GaussianParameterModel model{rng.normal_vector(n), S * S.transpose()};
  const Eigen::LLT<Eigen::MatrixXd> chol(model.covariance);
  const std::vector<double> prefix{0.2};

  const auto analytic = reduce_gaussian(P, model, prefix);

  const int samples = 100000;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd prop = I;
  for (double t : prefix) prop = (I - t * P) * prop;
  const Eigen::MatrixXd map = prop * P.inverse();
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = model.mean + chol.matrixL() * rng.normal_vector(n);
    acc += (analytic.basis.transpose() * (map * x)).array().square().matrix();
  }
  acc /= samples;
  for (int j = 0; j < n; ++j)
    EXPECT_NEAR(acc[j], analytic.weights[j], 0.02 * analytic.weights[j]);
}

TEST(OneStep, MatchesHandComputedRatio) {
  const auto red = make_reduction(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 1.0));
  EXPECT_NEAR(one_step_optimal(red), 3.0 / 5.0, 1e-15);
}

TEST(OneStep, SingleActiveModeAnnihilates) {
  const auto red = make_reduction(Eigen::Vector2d(1.0, 2.5), Eigen::Vector2d(0.0, 3.0));
  const double t = one_step_optimal(red);
  EXPECT_NEAR(t, 1.0 / 2.5, 1e-14);
  const auto next = propagate_weights(red, {t});
  EXPECT_NEAR(next.weights[1], 0.0, 1e-20);
}

TEST(OneStep, GridSearchConfirmsMinimizer) {
  Rng rng(9);
  // Condition number below 2 keeps the optimum inside [0, 2/lambda_max].
  Eigen::VectorXd lambdas(3), weights(3);
  lambdas << 1.0, 1.4, 1.8;
  for (int j = 0; j < 3; ++j) weights[j] = rng.uniform(0.2, 2.0);
  const auto red = make_reduction(lambdas, weights);
  const double closed = one_step_optimal(red);

  const double hi = 2.0 / lambdas.maxCoeff();
  double best = 0.0, best_val = reduction_objective(red, {0.0});
  for (int i = 0; i <= 4000000; ++i) {
    const double t = hi * i / 4000000.0;
    const double v = reduction_objective(red, {t});
    if (v < best_val) {
      best_val = v;
      best = t;
    }
  }
  EXPECT_NEAR(closed, best, 1e-6);
  EXPECT_THROW(one_step_optimal(make_reduction(lambdas, Eigen::Vector3d::Zero())),
               std::invalid_argument);
}

TEST(TwoStep, AnnihilationPairForTwoUnitModes) {
  const auto red = make_reduction(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 1.0));
  const auto m = MomentCoefficients::from(red);
  EXPECT_DOUBLE_EQ(m.a, 3.0);
  EXPECT_DOUBLE_EQ(m.b, 5.0);
  EXPECT_DOUBLE_EQ(m.c, 9.0);
  EXPECT_DOUBLE_EQ(m.d, 17.0);

  const auto pair = two_step_optimal(red);
  EXPECT_NEAR(pair[0], 1.0, 1e-12);
  EXPECT_NEAR(pair[1], 0.5, 1e-12);
  EXPECT_NEAR(reduction_objective(red, {pair[0], pair[1]}), 0.0, 1e-20);
}

TEST(TwoStep, GridOracleConfirmsGlobalOptimum) {
  const auto red = make_reduction(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 1.0));
  const auto pair = two_step_optimal(red);
  const auto grid = oracles::grid_minimize(red.eigenvalues, red.weights, 2, 1.2, 160);
  std::vector<double> sorted = grid.steps;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  EXPECT_NEAR(pair[0], sorted[0], 1e-6);
  EXPECT_NEAR(pair[1], sorted[1], 1e-6);
}

TEST(TwoStep, RandomReductionsBeatGridAndStayDistinctNonnegative) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd lambdas, weights;
    oracles::random_reduction(rng, 6, lambdas, weights);
    const auto red = make_reduction(lambdas, weights);
    const auto pair = two_step_optimal(red);

    EXPECT_GE(pair[0], 0.0);
    EXPECT_GE(pair[1], 0.0);
    EXPECT_NE(pair[0], pair[1]);

    const double hi = 1.1 / lambdas.minCoeff();
    const auto grid =
        oracles::grid_minimize(lambdas, weights, 2, hi, 120);
    const double closed_val = reduction_objective(red, {pair[0], pair[1]});
    EXPECT_LE(closed_val, grid.value + 1e-8);
  }
}

TEST(SolveCubic, FactoredPolynomials) {
  const auto roots = solve_cubic_real(1.0, -6.0, 11.0, -6.0);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], 3.0, 1e-10);
  EXPECT_NEAR(roots[1], 2.0, 1e-10);
  EXPECT_NEAR(roots[2], 1.0, 1e-10);

  const auto appendix = solve_cubic_real(-144.0, 264.0, -144.0, 24.0);
  ASSERT_EQ(appendix.size(), 3u);
  EXPECT_NEAR(appendix[0], 1.0, 1e-10);
  EXPECT_NEAR(appendix[1], 0.5, 1e-10);
  EXPECT_NEAR(appendix[2], 1.0 / 3.0, 1e-10);
}

TEST(SolveCubic, ReconstructsRandomRealRoots) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    double r1 = rng.uniform(-3.0, 3.0);
    double r2 = rng.uniform(-3.0, 3.0);
    double r3 = rng.uniform(-3.0, 3.0);
    std::vector<double> expected{r1, r2, r3};
    std::sort(expected.begin(), expected.end(), std::greater<double>());
    const double s = rng.uniform(0.5, 4.0);
    const auto roots = solve_cubic_real(
        s, -s * (r1 + r2 + r3), s * (r1 * r2 + r1 * r3 + r2 * r3),
        -s * r1 * r2 * r3);
    ASSERT_EQ(roots.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(roots[i], expected[i], 1e-9);
  }
}

TEST(SolveCubic, DegradesGracefully) {
  const auto quad = solve_cubic_real(0.0, 1.0, -3.0, 2.0);  // (t-1)(t-2)
  ASSERT_EQ(quad.size(), 2u);
  const auto lin = solve_cubic_real(0.0, 0.0, 2.0, -4.0);
  ASSERT_EQ(lin.size(), 1u);
  EXPECT_NEAR(lin[0], 2.0, 1e-12);
  EXPECT_THROW(solve_cubic_real(0.0, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(ThreeStep, AnnihilatesThreeUnitModes) {
  Eigen::VectorXd lambdas(3), weights(3);
  lambdas << 1.0, 2.0, 3.0;
  weights << 1.0, 1.0, 1.0;
  const auto red = make_reduction(lambdas, weights);

  const auto m = MomentCoefficients::from(red);
  EXPECT_DOUBLE_EQ(m.a, 6.0);
  EXPECT_DOUBLE_EQ(m.b, 14.0);
  EXPECT_DOUBLE_EQ(m.c, 36.0);
  EXPECT_DOUBLE_EQ(m.d, 98.0);
  EXPECT_DOUBLE_EQ(m.e, 276.0);
  EXPECT_DOUBLE_EQ(m.f, 794.0);

  // Appendix cubic coefficients for these power sums.
  const double d0 = m.a * m.c * m.e - m.b * m.b * m.e - m.a * m.d * m.d +
                    2 * m.b * m.c * m.d - m.c * m.c * m.c;
  const double d1 = m.c * m.c * m.d - m.b * m.d * m.d - m.b * m.c * m.e +
                    m.a * m.d * m.e + m.b * m.b * m.f - m.a * m.c * m.f;
  const double d2 = -m.c * m.d * m.d + m.c * m.c * m.e + m.b * m.d * m.e -
                    m.a * m.e * m.e - m.b * m.c * m.f + m.a * m.d * m.f;
  const double d3 = m.d * m.d * m.d - 2 * m.c * m.d * m.e + m.b * m.e * m.e +
                    m.c * m.c * m.f - m.b * m.d * m.f;
  EXPECT_DOUBLE_EQ(d3, -144.0);
  EXPECT_DOUBLE_EQ(d2, 264.0);
  EXPECT_DOUBLE_EQ(d1, -144.0);
  EXPECT_DOUBLE_EQ(d0, 24.0);

  const auto triple = three_step_optimal(red);
  EXPECT_NEAR(triple[0], 1.0, 1e-10);
  EXPECT_NEAR(triple[1], 0.5, 1e-10);
  EXPECT_NEAR(triple[2], 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(reduction_objective(red, {triple[0], triple[1], triple[2]}), 0.0,
              1e-18);
}

TEST(ThreeStep, BeatsGridRefineOracleOnRandomReductions) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd lambdas, weights;
    oracles::random_reduction(rng, 6, lambdas, weights);
    const auto red = make_reduction(lambdas, weights);
    const auto triple = three_step_optimal(red);
    const double closed_val =
        reduction_objective(red, {triple[0], triple[1], triple[2]});

    const double hi = 1.1 / lambdas.minCoeff();
    const auto grid = oracles::grid_minimize(lambdas, weights, 3, hi, 40);
    EXPECT_LE(closed_val, grid.value + 1e-8);
  }
}

TEST(PropagateWeights, AnnihilationAndIdentity) {
  const auto red = make_reduction(Eigen::Vector2d(1.0, 4.0), Eigen::Vector2d(2.0, 3.0));
  const auto hit = propagate_weights(red, {0.25});
  EXPECT_NEAR(hit.weights[1], 0.0, 1e-20);
  EXPECT_GT(hit.weights[0], 0.0);

  const auto same = propagate_weights(red, {});
  EXPECT_TRUE(same.weights == red.weights);
  EXPECT_EQ(same.step_index, red.step_index);
  EXPECT_EQ(hit.step_index, red.step_index + 1);
}

TEST(PropagateWeights, MatchesExplicitlyAdvancedIterates) {
  Rng rng(13);
  const int n = 5;
  const Eigen::MatrixXd P = random_spd(rng, n);
  std::vector<Eigen::VectorXd> errors;
  for (int i = 0; i < 3; ++i) errors.push_back(rng.normal_vector(n));
  const std::vector<double> steps{0.4, 0.05, 1.2};

  const auto advanced = propagate_weights(reduce_deterministic(P, errors), steps);

  std::vector<Eigen::VectorXd> moved = errors;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (auto& e : moved)
    for (double t : steps) e = (I - t * P) * e;
  const auto direct = reduce_deterministic(P, moved);

  EXPECT_LT((advanced.weights - direct.weights).cwiseAbs().maxCoeff(),
            1e-9 * std::max(1.0, direct.weights.maxCoeff()));
}

TEST(ProgressiveQuadratic, TwoStepBlockSolvesTwoModeProblemExactly) {
  const auto red = make_reduction(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 1.0));
  const auto result = train_quadratic_schedule(red, 2, 2, 1.0, 2.0);
  ASSERT_EQ(result.schedule.horizon(), 2);
  EXPECT_NEAR(result.schedule.step_varying[0][0], 1.0, 1e-12);
  EXPECT_NEAR(result.schedule.step_varying[1][0], 0.5, 1e-12);
  EXPECT_NEAR(result.losses.back(), 0.0, 1e-20);
  EXPECT_NEAR(result.schedule.steady_state[0], 2.0 / 3.0, 1e-15);
}

TEST(ProgressiveQuadratic, GreedyStepsMatchHandComputation) {
  const auto red = make_reduction(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 1.0));
  const auto result = train_quadratic_schedule(red, 1, 2, 1.0, 2.0);
  EXPECT_NEAR(result.schedule.step_varying[0][0], 0.6, 1e-14);
  EXPECT_NEAR(result.schedule.step_varying[1][0], 0.75, 1e-14);
}

TEST(ProgressiveQuadratic, LossesNonincreasingAndLargerBlocksNoWorse) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd lambdas, weights;
    oracles::random_reduction(rng, 6, lambdas, weights);
    const auto red = make_reduction(lambdas, weights);
    const int horizon = 6;

    double finals[4] = {0, 0, 0, 0};
    for (int block = 1; block <= 3; ++block) {
      const auto result =
          train_quadratic_schedule(red, block, horizon, 0.1, lambdas.maxCoeff());
      for (std::size_t i = 1; i < result.losses.size(); ++i)
        EXPECT_LE(result.losses[i], result.losses[i - 1] * (1.0 + 1e-12));
      finals[block] = result.losses.back();
    }
    EXPECT_LE(finals[3], finals[2] * (1.0 + 1e-9) + 1e-18);
    EXPECT_LE(finals[2], finals[1] * (1.0 + 1e-9) + 1e-18);
  }
}

TEST(RateCertificate, DiscreteAndIntervalForms) {
  // Single annihilation step on a one-point spectrum.
  Eigen::VectorXd lam(1);
  lam << 2.0;
  EXPECT_NEAR(rate_certificate({0.5}, lam), 0.0, 1e-16);

  // Constant optimal step over [mu, L]: ((kappa-1)/(kappa+1))^K.
  const double mu = 0.5, L = 4.0;
  const double kappa = L / mu;
  const int K = 7;
  const std::vector<double> steps(K, 2.0 / (mu + L));
  const double expected = std::pow((kappa - 1.0) / (kappa + 1.0), K);
  EXPECT_NEAR(rate_certificate_interval(steps, mu, L), expected, 1e-12);
}

TEST(RateCertificate, ChebyshevStepsHitEquioscillationValue) {
  const double mu = 1.0, L = 3.0;
  for (int B = 1; B <= 3; ++B) {
    const auto steps = chebyshev_steps(mu, L, B);
    // Equioscillation value 1 / T_B((L+mu)/(L-mu)).
    const double x0 = (L + mu) / (L - mu);
    double tprev = 1.0, tcur = x0;
    for (int i = 2; i <= B; ++i) {
      const double tnext = 2.0 * x0 * tcur - tprev;
      tprev = tcur;
      tcur = tnext;
    }
    const double expected = 1.0 / (B == 0 ? 1.0 : tcur);
    const double closed = rate_certificate_interval(steps, mu, L);
    EXPECT_NEAR(closed, expected, 1e-10);

    // Cross-check against a fine lambda grid.
    double grid_max = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double lamv = mu + (L - mu) * i / 10000.0;
      double p = 1.0;
      for (double t : steps) p *= 1.0 - t * lamv;
      grid_max = std::max(grid_max, std::abs(p));
    }
    EXPECT_NEAR(closed, grid_max, 1e-6);
  }
}

TEST(Theorems, OneStepNonnegativeOnRandomReductions) {
  Rng rng(15);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd lambdas, weights;
    oracles::random_reduction(rng, 6, lambdas, weights);
    // Allow zero weights as long as one stays positive.
    if (trial % 3 == 0) weights[0] = 0.0;
    EXPECT_GE(one_step_optimal(make_reduction(lambdas, weights)), 0.0);
  }
}

TEST(Theorems, EqualStepPerturbationStrictlyWorseAndHessianIndefinite) {
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd lambdas, weights;
    oracles::random_reduction(rng, 6, lambdas, weights);
    const auto red = make_reduction(lambdas, weights);
    const auto pair = two_step_optimal(red);
    const double opt = reduction_objective(red, {pair[0], pair[1]});
    const double mean = 0.5 * (pair[0] + pair[1]);
    EXPECT_GT(reduction_objective(red, {mean, mean}), opt);
  }

  // At any equal-step point the 2x2 Hessian is s*[[1,2],[2,1]] for some
  // positive s, hence indefinite; verify via central finite differences.
  Eigen::VectorXd lambdas(3), weights(3);
  lambdas << 0.8, 1.7, 2.9;
  weights << 1.0, 0.4, 0.9;
  const auto red = make_reduction(lambdas, weights);
  const double tbar = 0.37;
  const double h = 1e-4;
  auto f = [&](double t1, double t2) {
    return reduction_objective(red, {t1, t2});
  };
  const double f0 = f(tbar, tbar);
  const double h11 = (f(tbar + h, tbar) - 2 * f0 + f(tbar - h, tbar)) / (h * h);
  const double h22 = (f(tbar, tbar + h) - 2 * f0 + f(tbar, tbar - h)) / (h * h);
  const double h12 = (f(tbar + h, tbar + h) - f(tbar + h, tbar - h) -
                      f(tbar - h, tbar + h) + f(tbar - h, tbar - h)) /
                     (4 * h * h);
  double s = 0.0;
  for (int j = 0; j < 3; ++j)
    s += 2.0 * std::pow(1.0 - tbar * lambdas[j], 2) * lambdas[j] * lambdas[j] *
         weights[j];
  EXPECT_NEAR(h11, s, 1e-3 * s);
  EXPECT_NEAR(h22, s, 1e-3 * s);
  EXPECT_NEAR(h12, 2.0 * s, 1e-3 * s);
}

TEST(Theorems, PermutationInvarianceOfBlockSolutions) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd lambdas, weights;
    oracles::random_reduction(rng, 6, lambdas, weights);
    const auto red = make_reduction(lambdas, weights);
    const auto triple = three_step_optimal(red);
    std::vector<double> perm{triple[2], triple[0], triple[1]};
    const double a = reduction_objective(red, {triple[0], triple[1], triple[2]});
    const double b = reduction_objective(red, perm);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(Theorems, GaussianConsistencyWithSampledDeterministicReduction) {
  Rng rng(18);
  const int n = 4;
  const Eigen::MatrixXd P = random_spd(rng, n);
  const GaussianParameterModel model{Eigen::VectorXd::Zero(n),
                                     Eigen::MatrixXd::Identity(n, n)};
  const auto analytic = reduce_gaussian(P, model);

  const int samples = 100000;
  std::vector<Eigen::VectorXd> errors;
  errors.reserve(samples);
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  for (int s = 0; s < samples; ++s)
    errors.push_back(llt.solve(rng.normal_vector(n)));  // z0 - z* = P^{-1} x
  auto sampled = reduce_deterministic(P, errors);
  sampled.weights /= static_cast<double>(samples);
  for (int j = 0; j < n; ++j)
    EXPECT_NEAR(sampled.weights[j], analytic.weights[j],
                0.02 * analytic.weights[j]);
}
