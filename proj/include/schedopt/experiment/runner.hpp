#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schedopt/algorithms/admm_qp.hpp"
#include "schedopt/algorithms/baselines.hpp"
#include "schedopt/algorithms/gradient_descent.hpp"
#include "schedopt/algorithms/proximal_gradient.hpp"
#include "schedopt/bounds/quantile_bands.hpp"
#include "schedopt/evaluation.hpp"
#include "schedopt/experiment/config.hpp"
#include "schedopt/io/csv.hpp"
#include "schedopt/metrics.hpp"
#include "schedopt/parallel.hpp"
#include "schedopt/problems/deblur.hpp"
#include "schedopt/problems/lasso.hpp"
#include "schedopt/problems/logistic.hpp"
#include "schedopt/problems/ridge.hpp"
#include "schedopt/problems/streams.hpp"
#include "schedopt/quadratic/progressive.hpp"
#include "schedopt/quadratic/reduction.hpp"
#include "schedopt/train/progressive.hpp"
#include "schedopt/train/safeguard.hpp"
#include "schedopt/trace.hpp"

namespace schedopt {

struct MethodResult {
  std::string name;
  std::vector<std::vector<double>> series;  // metric per instance, per iterate
  std::vector<double> gm_curve;             // geometric mean across instances
};

struct EvaluateResult {
  std::vector<MethodResult> methods;
  int k_eval = 0;
};

/// Orchestrates the train / evaluate / bounds pipeline described by an
/// ExperimentConfig and writes the artifacts into the output directory.
class ExperimentRunner {
 public:
  explicit ExperimentRunner(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.family.kind == "ridge")
      ridge_.emplace(RidgeFamily::generate(cfg_.family.m, cfg_.family.n,
                                           cfg_.family.lambda_reg,
                                           cfg_.family.seed));
    else if (cfg_.family.kind == "lasso")
      lasso_.emplace(LassoFamily::generate(cfg_.family.m, cfg_.family.n,
                                           cfg_.family.lambda_reg,
                                           cfg_.family.seed));
    else if (cfg_.family.kind == "logistic")
      logistic_.emplace(LogisticFamily::generate(
          cfg_.family.points, cfg_.family.cov_dim, cfg_.family.separation,
          cfg_.family.seed));
    else
      deblur_.emplace(DeblurFamily::generate(
          cfg_.family.side, cfg_.family.blur_width, cfg_.family.noise_sd,
          cfg_.family.lambda_reg, cfg_.family.seed));
    check_algorithm_family();
  }

  const ExperimentConfig& config() const { return cfg_; }
  const RidgeFamily& ridge() const { return *ridge_; }
  const LassoFamily& lasso() const { return *lasso_; }
  const LogisticFamily& logistic() const { return *logistic_; }
  const DeblurFamily& deblur() const { return *deblur_; }

  void ensure_out_dir() const {
    std::filesystem::create_directories(cfg_.out_dir);
    write_file_atomic(path("config.json"), cfg_.to_json().dump(2) + "\n");
  }

  std::string path(const std::string& name) const {
    return (std::filesystem::path(cfg_.out_dir) / name).string();
  }

  /// Trains a schedule per the configured source and writes schedule.json
  /// plus training_log.csv.
  Schedule run_train() {
    ensure_out_dir();
    Schedule sched;
    CsvBuilder log("block,epoch,loss");

    if (cfg_.source.type == "vanilla") {
      sched = vanilla_schedule();
    } else if (cfg_.source.type == "closed_form") {
      if (cfg_.family.kind != "ridge")
        throw std::invalid_argument(
            "closed-form training needs the quadratic (ridge) family");
      const auto& fam = *ridge_;
      const EigenReduction red0 =
          reduce_gaussian(fam.gram(), fam.quadratic_parameter_model());
      const auto result = train_quadratic_schedule(
          red0, cfg_.source.block, cfg_.horizon, fam.strong_convexity(),
          fam.smoothness(), cfg_.train_horizon);
      for (std::size_t b = 0; b < result.losses.size(); ++b)
        log.cell(static_cast<int>(b)).cell(0).cell(result.losses[b]).end_row();
      sched = result.schedule;
    } else if (cfg_.source.type == "gradient") {
      TrainResult result = train_gradient();
      for (const auto& row : result.log)
        log.cell(row.block).cell(row.epoch).cell(row.loss).end_row();
      sched = std::move(result.schedule);
    } else {
      throw std::invalid_argument("unknown schedule source: " + cfg_.source.type);
    }

    sched.save(path("schedule.json"));
    log.save(path("training_log.csv"));
    return sched;
  }

  /// Evaluates learned schedules against the family's baselines on the test
  /// stream; writes results.csv (geometric-mean curves) and iters_to_tol.csv.
  EvaluateResult run_evaluate(
      const std::vector<std::pair<std::string, Schedule>>& learned) {
    ensure_out_dir();
    EvaluateResult result;
    result.k_eval = eval_horizon();

    if (ridge_)
      evaluate_unconstrained(*ridge_, GradientDescent(*ridge_), learned,
                             ridge_baselines(), result);
    else if (logistic_)
      evaluate_unconstrained(*logistic_, GradientDescent(*logistic_), learned,
                             logistic_baselines(), result);
    else if (lasso_)
      evaluate_unconstrained(*lasso_, ProximalGradient(*lasso_), learned,
                             lasso_baselines(), result);
    else
      evaluate_deblur(learned, result);

    write_results(result);
    return result;
  }

  struct BoundsArtifacts {
    std::vector<std::pair<int, QuantileBandResult>> per_iteration;
  };

  /// Risk-bound tables and quantile bands for a learned schedule on the
  /// validation stream; writes bounds.csv and bounds_summary.json.
  BoundsArtifacts run_bounds(const Schedule& sched) {
    ensure_out_dir();
    if (cfg_.eval_iterations.empty())
      throw std::invalid_argument("bounds need a nonempty eval iteration list");

    const int k_eval = eval_horizon();
    const auto series = validation_series(sched, k_eval);

    BoundsArtifacts artifacts;
    CsvBuilder csv("iteration,epsilon,empirical_risk,lower,upper");
    nlohmann::json summary;
    summary["confidence"] = 1.0 - 2.0 * cfg_.bounds.delta * cfg_.bounds.n_tol;
    summary["delta"] = cfg_.bounds.delta;
    summary["n_tol"] = cfg_.bounds.n_tol;
    summary["n_val"] = cfg_.n_val;
    summary["iterations"] = nlohmann::json::array();

    RiskBoundConfig rb;
    rb.n_val = cfg_.n_val;
    rb.delta = cfg_.bounds.delta;
    rb.grid = tolerance_grid(cfg_.bounds.tol_max, cfg_.bounds.tol_min,
                             cfg_.bounds.n_tol);
    rb.metric = deblur_ ? MetricKind::kMaxPrimalDualResidual
                        : MetricKind::kSuboptimality;

    for (int k : cfg_.eval_iterations) {
      std::vector<double> at;
      at.reserve(series.size());
      for (const auto& s : series) at.push_back(s[static_cast<std::size_t>(k)]);
      rb.iteration = k;
      const auto bands = quantile_bands(at, rb, cfg_.bounds.quantiles);
      for (const auto& row : bands.rows)
        csv.cell(k).cell(row.eps).cell(row.empirical).cell(row.lower)
            .cell(row.upper).end_row();
      nlohmann::json jk;
      jk["iteration"] = k;
      jk["bands"] = nlohmann::json::array();
      for (const auto& b : bands.bands)
        jk["bands"].push_back({{"level", b.level},
                               {"lower", b.lower},
                               {"upper", b.upper},
                               {"lower_at_grid_edge", b.lower_at_grid_edge},
                               {"upper_at_grid_edge", b.upper_at_grid_edge}});
      summary["iterations"].push_back(std::move(jk));
      artifacts.per_iteration.emplace_back(k, bands);
    }
    csv.save(path("bounds.csv"));
    write_file_atomic(path("bounds_summary.json"), summary.dump(2) + "\n");
    return artifacts;
  }

  void run_all() {
    const Schedule sched = run_train();
    run_evaluate({{"learned", sched}});
    run_bounds(sched);
  }

  /// Metric trajectories of a schedule on the validation stream (safeguarded
  /// on unconstrained families when enabled).
  std::vector<std::vector<double>> validation_series(const Schedule& sched,
                                                     int k_eval) {
    return schedule_series(sched, kValidationStream, cfg_.n_val, k_eval,
                           cfg_.safeguard);
  }

  /// Metric trajectories of a schedule on an arbitrary stream.
  std::vector<std::vector<double>> schedule_series(const Schedule& sched,
                                                   std::uint64_t stream,
                                                   int count, int k_eval,
                                                   bool safeguarded) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(count));
    if (ridge_) {
      GradientDescent op(*ridge_);
      run_unconstrained_schedule(*ridge_, op, sched, stream, count, k_eval,
                                 safeguarded, out);
    } else if (logistic_) {
      GradientDescent op(*logistic_);
      run_unconstrained_schedule(*logistic_, op, sched, stream, count, k_eval,
                                 safeguarded, out);
    } else if (lasso_) {
      ProximalGradient op(*lasso_);
      run_unconstrained_schedule(*lasso_, op, sched, stream, count, k_eval,
                                 safeguarded, out);
    } else {
      AdmmQp op(deblur_->qp());
      const FactorizationCache cache = prepare_factorizations(sched, op.qp());
      op.bind_cache(&cache);
      parallel_for(count, cfg_.threads, [&](int i) {
        const Eigen::VectorXd x = deblur_->parameter(stream, i);
        const IterateTrace trace = run_scheduled(op, sched, x, k_eval);
        out[static_cast<std::size_t>(i)] =
            residual_series(deblur_->qp(), trace.iterates, x, sched);
      });
    }
    return out;
  }

  /// Mean optimal objective value over the training instances; the safeguard
  /// suboptimality estimate is measured against it.
  double safeguard_floor() {
    if (safeguard_floor_cache_) return *safeguard_floor_cache_;
    const TrainingSet& tset = training_set();
    double total = 0.0;
    for (int i = 0; i < tset.size(); ++i) {
      if (ridge_)
        total += ridge_->objective(tset.solutions[static_cast<std::size_t>(i)],
                                   tset.parameters[static_cast<std::size_t>(i)]);
      else if (logistic_)
        total += logistic_->objective(tset.solutions[static_cast<std::size_t>(i)],
                                      tset.parameters[static_cast<std::size_t>(i)]);
      else if (lasso_)
        total += lasso_->objective(tset.solutions[static_cast<std::size_t>(i)],
                                   tset.parameters[static_cast<std::size_t>(i)]);
      else
        throw std::logic_error("safeguarding applies to unconstrained families only");
    }
    safeguard_floor_cache_ = total / tset.size();
    return *safeguard_floor_cache_;
  }

  /// Parameters + certified ground truths on the training stream. For the QP
  /// family the solutions are full fixed-point states assembled at the
  /// fallback penalties. Built once per runner.
  const TrainingSet& training_set() {
    if (tset_cache_) return *tset_cache_;
    TrainingSet tset;
    tset.parameters.resize(static_cast<std::size_t>(cfg_.n_train));
    tset.solutions.resize(static_cast<std::size_t>(cfg_.n_train));
    parallel_for(cfg_.n_train, cfg_.threads, [&](int i) {
      const std::size_t s = static_cast<std::size_t>(i);
      if (ridge_) {
        GradientDescent op(*ridge_);
        tset.parameters[s] = ridge_->parameter(kTrainStream, i);
        tset.solutions[s] = generate_ground_truth(op, *ridge_, tset.parameters[s]);
      } else if (logistic_) {
        GradientDescent op(*logistic_);
        tset.parameters[s] = logistic_->parameter(kTrainStream, i);
        tset.solutions[s] =
            generate_ground_truth(op, *logistic_, tset.parameters[s]);
      } else if (lasso_) {
        ProximalGradient op(*lasso_);
        tset.parameters[s] = lasso_->parameter(kTrainStream, i);
        tset.solutions[s] = generate_ground_truth(op, *lasso_, tset.parameters[s]);
      } else {
        tset.parameters[s] = deblur_->parameter(kTrainStream, i);
        tset.solutions[s] = deblur_state(tset.parameters[s]);
      }
    });
    tset_cache_ = std::move(tset);
    return *tset_cache_;
  }

  /// Fixed-point state of the deblur QP solution at the fallback penalties,
  /// certified against the operator.
  Eigen::VectorXd deblur_state(const Eigen::VectorXd& x) const {
    AdmmQp op(deblur_->qp());
    const Eigen::VectorXd w = deblur_->solve(x);
    const Eigen::VectorXd y = -deblur_->gradient(w, x);
    const Eigen::VectorXd fb = op.fallback_params();
    const Eigen::VectorXd state =
        qp_state_from_solution(deblur_->qp(), w, y, fb[1], fb[2]);
    const Eigen::VectorXd next = op.step(state, x, fb);
    if ((next - state).norm() > 1e-6)
      throw std::runtime_error("deblur ground truth failed fixed-point check");
    return state;
  }

  Schedule vanilla_schedule() const {
    Schedule sched;
    if (ridge_) {
      BaselineSchedule b{BaselineKind::kConstantGd, ridge_->smoothness(),
                         ridge_->strong_convexity(), 1};
      sched = b.to_schedule(0, "gradient_descent");
    } else if (logistic_) {
      BaselineSchedule b{BaselineKind::kConstantGd, logistic_->smoothness(),
                         0.0, 1};
      sched = b.to_schedule(0, "gradient_descent");
    } else if (lasso_) {
      sched = Schedule::constant(
          "proximal_gradient",
          Eigen::VectorXd::Constant(1, 1.0 / lasso_->smoothness()));
    } else {
      AdmmQp op(deblur_->qp());
      sched = Schedule::constant("admm_qp", op.fallback_params());
    }
    sched.train_horizon = cfg_.train_horizon;
    return sched;
  }

 private:
  void check_algorithm_family() const {
    const bool ok =
        (cfg_.algorithm == "gradient_descent" && (ridge_ || logistic_)) ||
        (cfg_.algorithm == "proximal_gradient" && lasso_) ||
        (cfg_.algorithm == "admm_qp" && deblur_);
    if (!ok)
      throw std::invalid_argument("algorithm " + cfg_.algorithm +
                                  " does not run on family " + cfg_.family.kind);
  }

  int eval_horizon() const {
    int k = cfg_.train_horizon;
    if (!cfg_.eval_iterations.empty())
      k = std::max(k, cfg_.eval_iterations.back());
    return k;
  }

  TrainConfig train_config() const {
    TrainConfig tc;
    tc.block_size = cfg_.source.block;
    tc.horizon = cfg_.horizon;
    tc.train_horizon = cfg_.train_horizon;
    tc.epochs = cfg_.source.epochs;
    tc.learning_rate = cfg_.source.learning_rate;
    tc.method = cfg_.source.gradient_method == "finite_difference"
                    ? GradientMethod::kCentralFiniteDifference
                    : GradientMethod::kAnalyticAdjoint;
    tc.seed = cfg_.seed;
    return tc;
  }

  TrainResult train_gradient() {
    const TrainingSet& tset = training_set();
    const TrainConfig tc = train_config();
    if (ridge_) {
      GradientDescent op(*ridge_);
      return train_progressive(op, "gradient_descent", tset, tc);
    }
    if (logistic_) {
      GradientDescent op(*logistic_);
      return train_progressive(op, "gradient_descent", tset, tc);
    }
    if (lasso_) {
      ProximalGradient op(*lasso_);
      return train_progressive(op, "proximal_gradient", tset, tc);
    }
    AdmmQp op(deblur_->qp());
    return train_progressive(op, "admm_qp", tset, tc);
  }

  std::vector<BaselineSchedule> ridge_baselines() const {
    const double L = ridge_->smoothness(), mu = ridge_->strong_convexity();
    return {{BaselineKind::kNesterovSc, L, mu, 1},
            {BaselineKind::kSilverSc, L, mu, 1},
            {BaselineKind::kConjugateGradient, L, mu, 1}};
  }
  std::vector<BaselineSchedule> logistic_baselines() const {
    const double L = logistic_->smoothness();
    return {{BaselineKind::kNesterovSmooth, L, 0.0, 1},
            {BaselineKind::kSilverSmooth, L, 0.0, 1}};
  }
  std::vector<BaselineSchedule> lasso_baselines() const {
    const double L = lasso_->smoothness();
    return {{BaselineKind::kFista, L, 0.0, 1}};
  }

  template <class Family, class Op>
  void run_unconstrained_schedule(const Family& fam, const Op& op,
                                  const Schedule& sched, std::uint64_t stream,
                                  int count, int k_eval, bool safeguarded,
                                  std::vector<std::vector<double>>& out) {
    std::optional<SafeguardPolicy> policy;
    if (safeguarded) {
      policy.emplace();
      policy->fallback = op.fallback_params();
      policy->objective_floor = safeguard_floor();
    }
    parallel_for(count, cfg_.threads, [&](int i) {
      const Eigen::VectorXd x = fam.parameter(stream, i);
      IterateTrace trace;
      if (policy) {
        trace = safeguarded_run(op, sched, *policy, x, k_eval,
                                [&](const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& xx) {
                                  return fam.objective(z, xx);
                                })
                    .trace;
      } else {
        trace = run_scheduled(op, sched, x, k_eval);
      }
      out[static_cast<std::size_t>(i)] = suboptimality_series(fam, trace, x);
    });
  }

  template <class Family, class Op>
  void evaluate_unconstrained(
      const Family& fam, const Op& op,
      const std::vector<std::pair<std::string, Schedule>>& learned,
      const std::vector<BaselineSchedule>& baselines, EvaluateResult& result) {
    const int k_eval = result.k_eval;
    const int count = cfg_.n_test;

    for (const auto& [name, sched] : learned) {
      MethodResult m;
      m.name = name;
      m.series.resize(static_cast<std::size_t>(count));
      run_unconstrained_schedule(fam, op, sched, kTestStream, count, k_eval,
                                 cfg_.safeguard, m.series);
      result.methods.push_back(std::move(m));
    }

    // Vanilla defaults: the constant-hyperparameter schedule of the operator.
    {
      MethodResult m;
      m.name = "vanilla";
      m.series.resize(static_cast<std::size_t>(count));
      run_unconstrained_schedule(fam, op, vanilla_schedule(), kTestStream,
                                 count, k_eval, false, m.series);
      result.methods.push_back(std::move(m));
    }

    for (const auto& b : baselines) {
      MethodResult m;
      m.name = baseline_name(b.kind);
      m.series.resize(static_cast<std::size_t>(count));
      parallel_for(count, cfg_.threads, [&](int i) {
        const Eigen::VectorXd x = fam.parameter(kTestStream, i);
        IterateTrace trace = run_baseline(b, fam, x, k_eval);
        m.series[static_cast<std::size_t>(i)] =
            suboptimality_series(fam, trace, x);
      });
      result.methods.push_back(std::move(m));
    }

    // Nearest-neighbor warm start of the vanilla method.
    {
      const TrainingSet& tset = training_set();
      MethodResult m;
      m.name = "nearest_neighbor";
      m.series.resize(static_cast<std::size_t>(count));
      const Schedule vanilla = vanilla_schedule();
      parallel_for(count, cfg_.threads, [&](int i) {
        const Eigen::VectorXd x = fam.parameter(kTestStream, i);
        const Eigen::VectorXd z0 =
            nearest_neighbor_warmstart(tset.parameters, tset.solutions, x);
        IterateTrace trace = run_scheduled(op, vanilla, x, k_eval, z0);
        m.series[static_cast<std::size_t>(i)] =
            suboptimality_series(fam, trace, x);
      });
      result.methods.push_back(std::move(m));
    }

    for (auto& m : result.methods) m.gm_curve = geometric_mean_series(m.series);
  }

  void evaluate_deblur(
      const std::vector<std::pair<std::string, Schedule>>& learned,
      EvaluateResult& result) {
    const int k_eval = result.k_eval;
    const int count = cfg_.n_test;

    auto eval_schedule = [&](const std::string& name, const Schedule& sched,
                             const TrainingSet* warmstart) {
      AdmmQp op(deblur_->qp());
      const FactorizationCache cache = prepare_factorizations(sched, op.qp());
      op.bind_cache(&cache);
      MethodResult m;
      m.name = name;
      m.series.resize(static_cast<std::size_t>(count));
      parallel_for(count, cfg_.threads, [&](int i) {
        const Eigen::VectorXd x = deblur_->parameter(kTestStream, i);
        IterateTrace trace;
        if (warmstart) {
          const Eigen::VectorXd z0 = nearest_neighbor_warmstart(
              warmstart->parameters, warmstart->solutions, x);
          trace = run_scheduled(op, sched, x, k_eval, z0);
        } else {
          trace = run_scheduled(op, sched, x, k_eval);
        }
        m.series[static_cast<std::size_t>(i)] =
            residual_series(deblur_->qp(), trace.iterates, x, sched);
      });
      result.methods.push_back(std::move(m));
    };

    for (const auto& [name, sched] : learned) eval_schedule(name, sched, nullptr);
    eval_schedule("vanilla", vanilla_schedule(), nullptr);
    const TrainingSet& tset = training_set();
    eval_schedule("nearest_neighbor", vanilla_schedule(), &tset);

    for (auto& m : result.methods) m.gm_curve = geometric_mean_series(m.series);
  }

  void write_results(const EvaluateResult& result) const {
    CsvBuilder curve("method,iteration,geometric_mean_metric");
    for (const auto& m : result.methods)
      for (std::size_t k = 0; k < m.gm_curve.size(); ++k)
        curve.cell(m.name).cell(static_cast<int>(k)).cell(m.gm_curve[k]).end_row();
    curve.save(path("results.csv"));

    CsvBuilder table("method,tolerance,iterations");
    for (const auto& m : result.methods)
      for (double tol : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
        const int it = iterations_to_tolerance(m.gm_curve, tol, -1);
        table.cell(m.name).cell(tol);
        if (it < 0)
          table.cell(std::string("max"));
        else
          table.cell(it);
        table.end_row();
      }
    table.save(path("iters_to_tol.csv"));
  }

  ExperimentConfig cfg_;
  std::optional<RidgeFamily> ridge_;
  std::optional<LassoFamily> lasso_;
  std::optional<LogisticFamily> logistic_;
  std::optional<DeblurFamily> deblur_;
  std::optional<TrainingSet> tset_cache_;
  std::optional<double> safeguard_floor_cache_;
};

}  // namespace schedopt
