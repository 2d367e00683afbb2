#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace schedopt {

/// Per-iteration hyperparameters for a two-phase solver run. The first H
/// iterations consume step_varying[0..H-1]; every iteration at index >= H
/// consumes steady_state. A run may be evaluated for any number of
/// iterations, including past the horizon the schedule was fitted on.
struct Schedule {
  std::string algorithm;
  int arity = 1;
  std::vector<Eigen::VectorXd> step_varying;
  Eigen::VectorXd steady_state;
  int train_horizon = 0;  // number of steps the schedule was fitted for (K)

  int horizon() const { return static_cast<int>(step_varying.size()); }  // H

  const Eigen::VectorXd& params_at(int k) const {
    return k < horizon() ? step_varying[static_cast<std::size_t>(k)]
                         : steady_state;
  }

  /// Scalar-hyperparameter convenience (arity 1).
  static Schedule from_steps(std::string algorithm,
                             const std::vector<double>& steps, double steady,
                             int train_horizon = -1) {
    Schedule s;
    s.algorithm = std::move(algorithm);
    s.arity = 1;
    s.step_varying.reserve(steps.size());
    for (double v : steps) s.step_varying.push_back(Eigen::VectorXd::Constant(1, v));
    s.steady_state = Eigen::VectorXd::Constant(1, steady);
    s.train_horizon = train_horizon >= 0 ? train_horizon : s.horizon();
    return s;
  }

  /// A schedule with no step-varying phase: every iteration uses `theta`.
  static Schedule constant(std::string algorithm, const Eigen::VectorXd& theta) {
    Schedule s;
    s.algorithm = std::move(algorithm);
    s.arity = static_cast<int>(theta.size());
    s.steady_state = theta;
    s.train_horizon = 0;
    return s;
  }

  void validate() const {
    if (arity < 1) throw std::invalid_argument("schedule arity must be positive");
    if (steady_state.size() != arity)
      throw std::invalid_argument("steady-state entry has wrong arity");
    for (const auto& v : step_varying)
      if (v.size() != arity)
        throw std::invalid_argument("step-varying entry has wrong arity");
    if (train_horizon < horizon())
      throw std::invalid_argument("train horizon K must be >= step-varying horizon H");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["algorithm"] = algorithm;
    j["a"] = arity;
    j["H"] = horizon();
    j["K"] = train_horizon;
    nlohmann::json sv = nlohmann::json::array();
    for (const auto& v : step_varying) {
      nlohmann::json row = nlohmann::json::array();
      for (int i = 0; i < v.size(); ++i) row.push_back(v[i]);
      sv.push_back(std::move(row));
    }
    j["step_varying"] = std::move(sv);
    nlohmann::json ss = nlohmann::json::array();
    for (int i = 0; i < steady_state.size(); ++i) ss.push_back(steady_state[i]);
    j["steady_state"] = std::move(ss);
    return j;
  }

  static Schedule from_json(const nlohmann::json& j) {
    Schedule s;
    s.algorithm = j.at("algorithm").get<std::string>();
    s.arity = j.at("a").get<int>();
    s.train_horizon = j.at("K").get<int>();
    for (const auto& row : j.at("step_varying")) {
      Eigen::VectorXd v(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) v[static_cast<int>(i)] = row[i].get<double>();
      s.step_varying.push_back(std::move(v));
    }
    const auto& ss = j.at("steady_state");
    s.steady_state.resize(static_cast<int>(ss.size()));
    for (std::size_t i = 0; i < ss.size(); ++i)
      s.steady_state[static_cast<int>(i)] = ss[i].get<double>();
    if (j.contains("H") && j.at("H").get<int>() != s.horizon())
      throw std::invalid_argument("schedule H field disagrees with step_varying length");
    s.validate();
    return s;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << to_json().dump(2) << "\n";
  }

  static Schedule load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

}  // namespace schedopt
