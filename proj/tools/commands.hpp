#pragma once

#include <string>
#include <vector>

#include "common.hpp"

namespace exploss::cli {

struct TransformPlotParams {
  std::vector<double> e_values{1.0, 0.75, 0.6};
  double c = 0.005;
  double range_min = -10.0;
  double range_max = 10.0;
  int steps = 401;
  std::string out;
  std::string config;
};
int run_transform_plot(TransformPlotParams params);

struct GradcheckParams {
  std::string loss = "logistic";
  double e = 1.0;
  double c = 0.005;
  double grad_cap = 1e6;
  int samples = 200;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};
int run_gradcheck(GradcheckParams params);

struct BoundsParams {
  std::string query;  // JSON file
  std::string out;
};
int run_bounds(BoundsParams params);

struct Lemma2Params {
  std::string loss = "logistic";
  double e = 1.0;
  double c = 0.005;
  double loss_lipschitz = 1.0;
  int dim = 2;
  double separation = 4.0;
  double epsilon = 0.1;
  double rho = 0.05;
  int sample_count = 200;
  int trials = 2000;
  long ref_samples = 10000000;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};
int run_lemma2(Lemma2Params params);

struct TrainCmdParams {
  DatasetSpec data;
  TrainParams train;
  std::uint64_t seed = 1;
  std::string out;
  std::string metrics;  // JSONL path, "-" for stdout, empty to skip
  std::string save_model;
  std::string config;
};
int run_train(TrainCmdParams params);

struct NoiseBenchParams {
  DatasetSpec data;
  TrainParams train;
  std::vector<double> e_values{1.0, 0.75, 0.6};
  std::vector<double> noise_rates{0.0, 0.2, 0.4, 0.6};
  int seeds = 5;
  std::uint64_t seed = 1;  // base seed; run s uses mix(seed, s)
  std::string out;
  std::string config;
};
int run_noise_bench(NoiseBenchParams params);

}  // namespace exploss::cli
