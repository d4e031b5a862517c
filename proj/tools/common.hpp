#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "exploss/data.hpp"
#include "exploss/losses.hpp"
#include "exploss/optim.hpp"

namespace exploss::cli {

// Stable exit-code contract: 0 success, 1 check failure, 2 configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& doc);
void write_text_file(const std::string& path, const std::string& text);

// Number of worker threads for independent experiment cells; capped by the
// RL_THREADS environment variable.
int cell_threads();

// Synthetic or file-backed dataset request shared by train and noise-bench.
struct DatasetSpec {
  std::string kind = "gaussians";  // gaussians | outlier-gaussians | csv | mnist
  int n_per_class = 500;
  int test_n_per_class = 1000;
  int dim = 2;
  double separation = 4.0;
  double outlier_frac = 0.1;
  double outlier_scale = 3.0;
  std::string train_csv;
  std::string test_csv;
  std::string mnist_dir = "data/mnist";
  int train_limit = 0;  // 0 = all
  int test_limit = 0;
  bool unit_ball = false;

  nlohmann::json to_json() const;
  void apply_json(const nlohmann::json& j);  // unknown keys -> ConfigError
};

struct DatasetPair {
  Dataset train;
  Dataset test;
};

// Builds the train/test pair. Synthetic kinds draw fresh data from streams
// derived from `seed`; file kinds ignore it. For binary losses class-index
// labels {0,1} are mapped to -1/+1.
DatasetPair build_datasets(const DatasetSpec& spec, const LossSpec& loss, std::uint64_t seed);

// Training-side knobs shared by train and noise-bench.
struct TrainParams {
  std::string loss = "logistic";
  double e = 1.0;
  double c = 0.005;
  double grad_cap = 1e6;
  std::string optimizer = "sgd";
  double learning_rate = 0.1;
  int batch_size = 32;
  int epochs = 30;
  double warmup_frac = 0.1;
  std::vector<int> hidden;
  bool bias = false;
  std::optional<double> projection_radius;

  nlohmann::json to_json() const;
  void apply_json(const nlohmann::json& j);
  TrainConfig to_config(std::uint64_t seed) const;
};

nlohmann::json epoch_metrics_json(int epoch, const EpochMetrics& m);
nlohmann::json trace_json(const TrainResult& result);

double mean_of(const std::vector<double>& xs);
double std_of(const std::vector<double>& xs);  // population form

}  // namespace exploss::cli
