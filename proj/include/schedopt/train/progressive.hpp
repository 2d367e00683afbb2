#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "schedopt/schedule.hpp"
#include "schedopt/train/loss.hpp"
#include "schedopt/train/training_set.hpp"

namespace schedopt {

struct TrainLogRow {
  int block = 0;
  int epoch = 0;
  double loss = 0.0;
};

struct TrainResult {
  Schedule schedule;
  std::vector<TrainLogRow> log;
  std::vector<Eigen::VectorXd> final_iterates;
};

namespace detail {

/// Plain gradient descent on the free weights with best-iterate keep; the
/// step size backs off by 4x whenever a proposed move produces a non-finite
/// loss. Returns the best weights seen (never worse than the initialization).
template <class Op>
std::pair<BlockParam, double> optimize_block(
    const Op& op, BlockParam block, const std::vector<Eigen::VectorXd>& starts,
    const std::vector<Eigen::VectorXd>& truths,
    const std::vector<Eigen::VectorXd>& params, const TrainConfig& cfg,
    int block_index, std::vector<TrainLogRow>& log) {
  double lr = cfg.learning_rate;
  const double lr_floor = cfg.learning_rate / 65536.0;

  double loss = lookahead_loss(op, block, starts, truths, params);
  BlockParam best = block;
  double best_loss = loss;
  log.push_back({block_index, 0, loss});

  for (int epoch = 1; epoch <= cfg.epochs && best_loss > 0.0; ++epoch) {
    Eigen::MatrixXd grad;
    try {
      grad = lookahead_gradient(op, block, starts, truths, params, cfg.method);
    } catch (const std::runtime_error&) {
      block = best;  // gradient blew up away from the best point
      lr /= 4.0;
      if (lr < lr_floor) throw std::runtime_error("divergent training block");
      continue;
    }
    BlockParam candidate = block;
    candidate.nu -= lr * grad;
    double cand_loss;
    try {
      cand_loss = lookahead_loss(op, candidate, starts, truths, params);
    } catch (const std::runtime_error&) {
      lr /= 4.0;
      if (lr < lr_floor) throw std::runtime_error("divergent training block");
      continue;
    }
    block = std::move(candidate);
    loss = cand_loss;
    if (loss < best_loss) {
      best_loss = loss;
      best = block;
    }
    log.push_back({block_index, epoch, loss});
  }
  return {best, best_loss};
}

}  // namespace detail

/// Progressive training: optimize B hyperparameter steps at a time against
/// the lookahead loss, advance the training iterates those B steps, repeat
/// until H steps are fitted; finally fit the steady-state entry on steps H..K
/// with its coordinates tied and constrained to the convergence region. All
/// blocks initialize at the operator's fallback hyperparameters, so the best
/// kept iterate can never lose to them.
template <class Op>
TrainResult train_progressive(const Op& op, const std::string& algorithm,
                              const TrainingSet& tset, const TrainConfig& cfg) {
  cfg.validate();
  tset.validate();

  TrainResult result;
  std::vector<Eigen::VectorXd> iterates(
      static_cast<std::size_t>(tset.size()),
      Eigen::VectorXd::Zero(op.dim()));

  std::vector<Eigen::VectorXd> steps;
  steps.reserve(static_cast<std::size_t>(cfg.horizon));
  int block_index = 0;
  int done = 0;
  while (done < cfg.horizon) {
    const int b = std::min(cfg.block_size, cfg.horizon - done);
    BlockParam init = BlockParam::from_theta(op.step_reparams(),
                                             op.fallback_params(), b, false);
    auto [best, best_loss] = detail::optimize_block(
        op, init, iterates, tset.solutions, tset.parameters, cfg, block_index,
        result.log);
    (void)best_loss;
    const auto thetas = best.thetas();
    for (const auto& theta : thetas) {
      for (std::size_t i = 0; i < iterates.size(); ++i)
        iterates[i] = op.step(iterates[i], tset.parameters[i], theta);
      steps.push_back(theta);
    }
    done += b;
    ++block_index;
  }

  Eigen::VectorXd steady = op.fallback_params();
  if (cfg.train_horizon > cfg.horizon) {
    BlockParam init = BlockParam::from_theta(op.steady_reparams(), steady,
                                             cfg.train_horizon - cfg.horizon,
                                             true);
    auto [best, best_loss] = detail::optimize_block(
        op, init, iterates, tset.solutions, tset.parameters, cfg, block_index,
        result.log);
    (void)best_loss;
    steady = best.theta_at(0);
    for (int s = 0; s < cfg.train_horizon - cfg.horizon; ++s)
      for (std::size_t i = 0; i < iterates.size(); ++i)
        iterates[i] = op.step(iterates[i], tset.parameters[i], steady);
  }

  result.schedule.algorithm = algorithm;
  result.schedule.arity = op.arity();
  result.schedule.step_varying = std::move(steps);
  result.schedule.steady_state = steady;
  result.schedule.train_horizon = cfg.train_horizon;
  result.schedule.validate();
  result.final_iterates = std::move(iterates);
  return result;
}

}  // namespace schedopt
