#pragma once

#include <stdexcept>
#include <vector>

#include "schedopt/quadratic/closed_form.hpp"
#include "schedopt/quadratic/reduction.hpp"
#include "schedopt/schedule.hpp"

namespace schedopt {

struct QuadraticTrainResult {
  Schedule schedule;
  std::vector<double> losses;  // sum of weights after 0, B, 2B, ... steps
  EigenReduction final_reduction;
};

/// Progressive closed-form training for gradient descent on a quadratic:
/// alternates between solving the B-step lookahead exactly (B in {1,2,3}) and
/// advancing the reduction those B steps. A trailing block shorter than B is
/// solved with the matching smaller lookahead. The steady-state entry is the
/// optimal constant step 2 / (mu + L), which lies inside (0, 2/L).
inline QuadraticTrainResult train_quadratic_schedule(const EigenReduction& red0,
                                                     int block, int horizon,
                                                     double mu_sc, double L,
                                                     int train_horizon = -1) {
  if (block < 1 || block > 3)
    throw std::invalid_argument("closed-form lookahead supports B in {1, 2, 3}");
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");

  QuadraticTrainResult result;
  EigenReduction red = red0;
  std::vector<double> steps;
  steps.reserve(static_cast<std::size_t>(horizon));
  result.losses.push_back(red.weights.sum());

  int done = 0;
  while (done < horizon) {
    const int b = std::min(block, horizon - done);
    std::vector<double> block_steps;
    if (red.weights.maxCoeff() <= 0.0) {
      // Fully annihilated: any valid step keeps the loss at zero.
      block_steps.assign(static_cast<std::size_t>(b), 1.0 / L);
    } else if (b == 1) {
      block_steps = {one_step_optimal(red)};
    } else if (b == 2) {
      const auto pair = two_step_optimal(red);
      block_steps = {pair[0], pair[1]};
    } else {
      const auto triple = three_step_optimal(red);
      block_steps = {triple[0], triple[1], triple[2]};
    }
    red = propagate_weights(red, block_steps);
    steps.insert(steps.end(), block_steps.begin(), block_steps.end());
    result.losses.push_back(red.weights.sum());
    done += b;
  }

  result.schedule = Schedule::from_steps("gradient_descent", steps,
                                         2.0 / (mu_sc + L),
                                         train_horizon >= 0 ? train_horizon : horizon);
  result.final_reduction = red;
  return result;
}

}  // namespace schedopt
