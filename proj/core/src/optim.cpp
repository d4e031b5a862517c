#include "exploss/optim.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace exploss {

const char* to_string(OptimizerKind kind) {
  return kind == OptimizerKind::SGD ? "sgd" : "adam";
}

OptimizerKind optimizer_from_string(std::string_view name) {
  if (name == "sgd") return OptimizerKind::SGD;
  if (name == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer \"" + std::string(name) + "\", expected sgd|adam");
}

void TrainConfig::validate() const {
  loss.validate();
  if (!(optimizer.learning_rate >= 0.0)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
  }
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (total_epochs < 1) throw std::invalid_argument("TrainConfig: total_epochs must be >= 1");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw std::invalid_argument("TrainConfig: warmup_fraction must lie in [0, 1)");
  }
  for (int h : model.hidden) {
    if (h < 1) throw std::invalid_argument("TrainConfig: hidden widths must be positive");
  }
  if (projection_radius && !(*projection_radius > 0.0)) {
    throw std::invalid_argument("TrainConfig: projection_radius must be > 0");
  }
}

int warmup_epochs(const TrainConfig& cfg) {
  // Small bias guards against 0.3 * 10 == 2.999... landing below the
  // intended integer.
  return static_cast<int>(std::floor(cfg.warmup_fraction * cfg.total_epochs + 1e-9));
}

double effective_e(int epoch, const TrainConfig& cfg) {
  if (epoch < 0 || epoch >= cfg.total_epochs) {
    throw std::domain_error("effective_e: epoch " + std::to_string(epoch) +
                            " out of range [0, " + std::to_string(cfg.total_epochs) + ")");
  }
  return epoch < warmup_epochs(cfg) ? 1.0 : cfg.loss.transform.e;
}

void sgd_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
              double lr) {
  if (params.size() != grads.size()) throw std::invalid_argument("sgd_step: shape mismatch");
  params -= lr * grads;
}

void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamState& state, const OptimizerConfig& cfg) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: shape mismatch");
  if (state.m.size() == 0) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
  }
  if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: state mismatch");
  state.step += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.cwiseProduct(grads);
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  params -= (cfg.learning_rate * (state.m / bc1).array() /
             ((state.v / bc2).array().sqrt() + cfg.eps))
                .matrix();
}

namespace {

struct ParamBlock {
  double* data;
  Eigen::Index size;
};

std::vector<ParamBlock> parameter_blocks(Model& model) {
  std::vector<ParamBlock> blocks;
  if (auto* lin = std::get_if<LinearModel>(&model)) {
    blocks.push_back({lin->w.data(), lin->w.size()});
    return blocks;
  }
  auto& mlp = std::get<MlpModel>(model);
  for (auto& layer : mlp.layers) {
    blocks.push_back({layer.W.data(), layer.W.size()});
    blocks.push_back({layer.b.data(), layer.b.size()});
  }
  return blocks;
}

std::vector<ParamBlock> grad_blocks(Eigen::VectorXd& linear_grad) {
  return {{linear_grad.data(), linear_grad.size()}};
}

std::vector<ParamBlock> grad_blocks(MlpGrads& grads) {
  std::vector<ParamBlock> blocks;
  for (auto& layer : grads.layers) {
    blocks.push_back({layer.W.data(), layer.W.size()});
    blocks.push_back({layer.b.data(), layer.b.size()});
  }
  return blocks;
}

constexpr std::uint64_t kInitStream = 0xA11CEULL;
constexpr std::uint64_t kShuffleBase = 0x5F0000000ULL;

}  // namespace

double accuracy(const Model& model, const Dataset& ds) {
  const bool binary = ds.label_kind == LabelKind::BinaryPM1;
  const auto pred = model_predict(model, ds.X, binary);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += (pred[i] == ds.labels[i]);
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

TrainResult train(const TrainConfig& cfg, const Dataset& train_set, const Dataset& test_set) {
  cfg.validate();
  train_set.validate();
  test_set.validate();
  const bool binary = cfg.loss.base != BaseLoss::SoftmaxCE;
  if (binary && train_set.label_kind != LabelKind::BinaryPM1) {
    throw std::invalid_argument("train: binary losses need {-1,+1} labels");
  }
  if (!binary && train_set.label_kind != LabelKind::ClassIndex) {
    throw std::invalid_argument("train: softmax loss needs class-index labels");
  }
  if (train_set.dim() != test_set.dim()) {
    throw std::invalid_argument("train: train/test feature dims differ");
  }

  const Eigen::Index n = train_set.size();
  const Eigen::Index d = train_set.dim();
  const int out_dim = binary ? 1 : train_set.num_classes;

  Rng init_rng = Rng::substream(cfg.seed, kInitStream);
  Model model;
  if (cfg.model.hidden.empty()) {
    if (!binary && out_dim > 1) {
      throw std::invalid_argument("train: multiclass training requires an MLP model");
    }
    model = init_linear(static_cast<int>(d), cfg.model.with_bias, init_rng);
  } else {
    std::vector<int> dims{static_cast<int>(d)};
    dims.insert(dims.end(), cfg.model.hidden.begin(), cfg.model.hidden.end());
    dims.push_back(out_dim);
    model = init_mlp(dims, init_rng);
  }

  auto params = parameter_blocks(model);
  std::vector<AdamState> adam(params.size());

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.epochs.reserve(static_cast<std::size_t>(cfg.total_epochs));

  Eigen::MatrixXd batch_x;
  Eigen::RowVectorXd softmax_grad;
  MlpTrace trace;
  MlpGrads mlp_grads;
  Eigen::VectorXd linear_grad;

  for (int epoch = 0; epoch < cfg.total_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    LossSpec spec = cfg.loss;
    spec.transform.e = effective_e(epoch, cfg);

    Rng shuffle_rng = Rng::substream(cfg.seed, kShuffleBase + static_cast<std::uint64_t>(epoch));
    fisher_yates(order, shuffle_rng);

    const int n_batches = static_cast<int>((n + cfg.batch_size - 1) / cfg.batch_size);
    for (int batch = 0; batch < n_batches; ++batch) {
      const Eigen::Index lo = static_cast<Eigen::Index>(batch) * cfg.batch_size;
      const Eigen::Index hi = std::min<Eigen::Index>(lo + cfg.batch_size, n);
      const Eigen::Index bs = hi - lo;

      batch_x.resize(bs, d);
      for (Eigen::Index i = 0; i < bs; ++i) {
        batch_x.row(i) = train_set.X.row(order[static_cast<std::size_t>(lo + i)]);
      }

      double batch_loss = 0.0;
      const double inv_bs = 1.0 / static_cast<double>(bs);

      if (auto* lin = std::get_if<LinearModel>(&model)) {
        const Eigen::VectorXd scores = lin->score_batch(batch_x);
        Eigen::VectorXd dscores(bs);
        for (Eigen::Index i = 0; i < bs; ++i) {
          const int y = train_set.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(lo + i)])];
          const double m = y * sigma(scores[i], spec.transform);
          batch_loss += binary_margin_value(spec.base, m);
          dscores[i] = inv_bs * binary_margin_dloss(spec.base, m) * y *
                       sigma_deriv(scores[i], spec.transform);
        }
        batch_loss *= inv_bs;
        linear_grad.resize(lin->w.size());
        linear_grad.head(d) = batch_x.transpose() * dscores;
        if (lin->has_bias) linear_grad[d] = dscores.sum();
      } else {
        auto& mlp = std::get<MlpModel>(model);
        const Eigen::MatrixXd scores = mlp_forward_cached(mlp, batch_x, trace);
        Eigen::MatrixXd dscores(bs, scores.cols());
        for (Eigen::Index i = 0; i < bs; ++i) {
          const int y = train_set.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(lo + i)])];
          if (binary) {
            const double m = y * sigma(scores(i, 0), spec.transform);
            batch_loss += binary_margin_value(spec.base, m);
            dscores(i, 0) = inv_bs * binary_margin_dloss(spec.base, m) * y *
                            sigma_deriv(scores(i, 0), spec.transform);
          } else {
            batch_loss += softmax_ce_row(spec, scores.row(i), y, &softmax_grad);
            dscores.row(i) = inv_bs * softmax_grad;
          }
        }
        batch_loss *= inv_bs;
        mlp_backward(mlp, trace, dscores, mlp_grads);
      }

      if (!std::isfinite(batch_loss)) {
        throw TrainingDiverged(epoch, batch,
                               "non-finite training loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch));
      }

      auto grads = std::holds_alternative<LinearModel>(model) ? grad_blocks(linear_grad)
                                                              : grad_blocks(mlp_grads);
      for (std::size_t b = 0; b < params.size(); ++b) {
        Eigen::Map<Eigen::VectorXd> p(params[b].data, params[b].size);
        Eigen::Map<const Eigen::VectorXd> g(grads[b].data, grads[b].size);
        if (cfg.optimizer.kind == OptimizerKind::SGD) {
          sgd_step(p, g, cfg.optimizer.learning_rate);
        } else {
          adam_step(p, g, adam[b], cfg.optimizer);
        }
      }

      if (cfg.projection_radius) {
        if (auto* lin = std::get_if<LinearModel>(&model)) {
          const double norm = lin->w.norm();
          if (norm > *cfg.projection_radius) lin->w *= *cfg.projection_radius / norm;
        }
      }
    }

    EpochMetrics m;
    m.effective_e = spec.transform.e;
    m.train_loss = empirical_risk(spec, model_scores(model, train_set.X), train_set.labels);
    m.train_acc = accuracy(model, train_set);
    m.test_acc = accuracy(model, test_set);
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.epochs.push_back(m);
  }

  result.model = std::move(model);
  return result;
}

}  // namespace exploss
