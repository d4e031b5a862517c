#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exploss/data.hpp"
#include "exploss/losses.hpp"
#include "exploss/model.hpp"

namespace exploss {

enum class OptimizerKind { SGD, Adam };

const char* to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::SGD;
  double learning_rate = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Architecture request; the input/output dims come from the data and loss.
struct ModelSpec {
  std::vector<int> hidden;  // empty -> linear model
  bool with_bias = false;   // linear model only; MLP layers always carry biases
};

struct TrainConfig {
  LossSpec loss;
  OptimizerConfig optimizer;
  ModelSpec model;
  int batch_size = 32;
  int total_epochs = 1;
  double warmup_fraction = 0.1;  // fraction of epochs trained at e = 1
  std::uint64_t seed = 0;
  std::optional<double> projection_radius;  // ||w||_2 ball for linear models

  void validate() const;
};

int warmup_epochs(const TrainConfig& cfg);

// e = 1 during the warm-up epochs, then the configured target e.
// Out-of-range epoch throws std::domain_error.
double effective_e(int epoch, const TrainConfig& cfg);

struct EpochMetrics {
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double effective_e = 1.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> epochs;
  Model model;
};

// Thrown when the training loss turns non-finite; carries the location.
struct TrainingDiverged : std::runtime_error {
  int epoch;
  int batch;
  TrainingDiverged(int epoch_, int batch_, const std::string& msg)
      : std::runtime_error(msg), epoch(epoch_), batch(batch_) {}
};

// Plain gradient step p <- p - lr * g on one parameter block.
void sgd_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
              double lr);

// First/second moment estimates for one parameter block.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
};

// Standard biased-moment Adam update with the constants from the config.
void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamState& state, const OptimizerConfig& cfg);

// Mini-batch training: per-epoch Fisher-Yates reshuffling from a stream
// derived from (seed, epoch), the warm-up e schedule, and optional
// projection of linear weights after every update. Deterministic for a
// fixed config and data.
TrainResult train(const TrainConfig& cfg, const Dataset& train_set, const Dataset& test_set);

double accuracy(const Model& model, const Dataset& ds);

}  // namespace exploss
