#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace schedopt {

struct FamilyConfig {
  std::string kind;  // ridge | lasso | logistic | deblur
  int m = 50;
  int n = 100;
  double lambda_reg = 0.01;
  int points = 50;    // logistic dataset size per instance
  int cov_dim = 5;    // logistic covariate dimension
  double separation = 1.0;
  int side = 10;      // deblur image side
  int blur_width = 3;
  double noise_sd = 0.001;
  std::uint64_t seed = 0;
};

struct ScheduleSourceConfig {
  std::string type = "closed_form";  // closed_form | gradient | vanilla
  int block = 2;                     // B
  int epochs = 200;
  double learning_rate = 0.1;
  std::string gradient_method = "adjoint";  // adjoint | finite_difference
};

struct BoundsSettings {
  double delta = 1e-5;
  int n_tol = 151;
  double tol_max = 1e5;
  double tol_min = 1e-10;
  std::vector<double> quantiles = {0.025, 0.975};
};

struct ExperimentConfig {
  FamilyConfig family;
  std::string algorithm;  // gradient_descent | proximal_gradient | admm_qp
  ScheduleSourceConfig source;
  int horizon = 50;        // H
  int train_horizon = 60;  // K
  int n_train = 10;
  int n_val = 1000;
  int n_test = 1000;
  std::vector<int> eval_iterations = {10, 20, 30, 40, 50, 60};
  BoundsSettings bounds;
  bool safeguard = true;  // unconstrained families only
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const {
    if (family.kind != "ridge" && family.kind != "lasso" &&
        family.kind != "logistic" && family.kind != "deblur")
      throw std::invalid_argument("unknown family kind: " + family.kind);
    if (algorithm != "gradient_descent" && algorithm != "proximal_gradient" &&
        algorithm != "admm_qp")
      throw std::invalid_argument("unknown algorithm: " + algorithm);
    if (train_horizon < horizon)
      throw std::invalid_argument("config requires K >= H");
    if (n_train < 1) throw std::invalid_argument("config requires N_train >= 1");
    if (n_val < 1 || n_test < 1)
      throw std::invalid_argument("config requires N_val, N_test >= 1");
    for (std::size_t i = 1; i < eval_iterations.size(); ++i)
      if (eval_iterations[i] <= eval_iterations[i - 1])
        throw std::invalid_argument("eval iterations must be sorted ascending");
    if (!eval_iterations.empty() && eval_iterations.front() < 0)
      throw std::invalid_argument("eval iterations must be nonnegative");
    if (bounds.n_tol < 1) throw std::invalid_argument("bounds need n_tol >= 1");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["family"] = {{"kind", family.kind},
                   {"m", family.m},
                   {"n", family.n},
                   {"lambda_reg", family.lambda_reg},
                   {"points", family.points},
                   {"cov_dim", family.cov_dim},
                   {"separation", family.separation},
                   {"side", family.side},
                   {"blur_width", family.blur_width},
                   {"noise_sd", family.noise_sd},
                   {"seed", family.seed}};
    j["algorithm"] = algorithm;
    j["schedule_source"] = {{"type", source.type},
                            {"block", source.block},
                            {"epochs", source.epochs},
                            {"learning_rate", source.learning_rate},
                            {"gradient_method", source.gradient_method}};
    j["H"] = horizon;
    j["K"] = train_horizon;
    j["n_train"] = n_train;
    j["n_val"] = n_val;
    j["n_test"] = n_test;
    j["eval_iterations"] = eval_iterations;
    j["bounds"] = {{"delta", bounds.delta},
                   {"n_tol", bounds.n_tol},
                   {"tol_max", bounds.tol_max},
                   {"tol_min", bounds.tol_min},
                   {"quantiles", bounds.quantiles}};
    j["safeguard"] = safeguard;
    j["out_dir"] = out_dir;
    j["seed"] = seed;
    j["threads"] = threads;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    const auto& f = j.at("family");
    c.family.kind = f.at("kind").get<std::string>();
    if (f.contains("m")) c.family.m = f.at("m").get<int>();
    if (f.contains("n")) c.family.n = f.at("n").get<int>();
    if (f.contains("lambda_reg")) c.family.lambda_reg = f.at("lambda_reg").get<double>();
    if (f.contains("points")) c.family.points = f.at("points").get<int>();
    if (f.contains("cov_dim")) c.family.cov_dim = f.at("cov_dim").get<int>();
    if (f.contains("separation")) c.family.separation = f.at("separation").get<double>();
    if (f.contains("side")) c.family.side = f.at("side").get<int>();
    if (f.contains("blur_width")) c.family.blur_width = f.at("blur_width").get<int>();
    if (f.contains("noise_sd")) c.family.noise_sd = f.at("noise_sd").get<double>();
    if (f.contains("seed")) c.family.seed = f.at("seed").get<std::uint64_t>();
    c.algorithm = j.at("algorithm").get<std::string>();
    if (j.contains("schedule_source")) {
      const auto& s = j.at("schedule_source");
      if (s.contains("type")) c.source.type = s.at("type").get<std::string>();
      if (s.contains("block")) c.source.block = s.at("block").get<int>();
      if (s.contains("epochs")) c.source.epochs = s.at("epochs").get<int>();
      if (s.contains("learning_rate"))
        c.source.learning_rate = s.at("learning_rate").get<double>();
      if (s.contains("gradient_method"))
        c.source.gradient_method = s.at("gradient_method").get<std::string>();
    }
    if (j.contains("H")) c.horizon = j.at("H").get<int>();
    if (j.contains("K")) c.train_horizon = j.at("K").get<int>();
    if (j.contains("n_train")) c.n_train = j.at("n_train").get<int>();
    if (j.contains("n_val")) c.n_val = j.at("n_val").get<int>();
    if (j.contains("n_test")) c.n_test = j.at("n_test").get<int>();
    if (j.contains("eval_iterations"))
      c.eval_iterations = j.at("eval_iterations").get<std::vector<int>>();
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      if (b.contains("delta")) c.bounds.delta = b.at("delta").get<double>();
      if (b.contains("n_tol")) c.bounds.n_tol = b.at("n_tol").get<int>();
      if (b.contains("tol_max")) c.bounds.tol_max = b.at("tol_max").get<double>();
      if (b.contains("tol_min")) c.bounds.tol_min = b.at("tol_min").get<double>();
      if (b.contains("quantiles"))
        c.bounds.quantiles = b.at("quantiles").get<std::vector<double>>();
    }
    if (j.contains("safeguard")) c.safeguard = j.at("safeguard").get<bool>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    c.validate();
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

}  // namespace schedopt
