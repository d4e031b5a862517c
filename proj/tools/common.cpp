#include "common.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "exploss/rng.hpp"

namespace exploss::cli {

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw ConfigError("failed writing " + path);
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

int cell_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("RL_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      throw ConfigError("RL_THREADS must be a positive integer");
    }
  }
  return n;
}

nlohmann::json DatasetSpec::to_json() const {
  nlohmann::json j{{"kind", kind}};
  if (kind == "gaussians" || kind == "outlier-gaussians") {
    j["n_per_class"] = n_per_class;
    j["test_n_per_class"] = test_n_per_class;
    j["dim"] = dim;
    j["separation"] = separation;
  }
  if (kind == "outlier-gaussians") {
    j["outlier_frac"] = outlier_frac;
    j["outlier_scale"] = outlier_scale;
  }
  if (kind == "csv") {
    j["train_csv"] = train_csv;
    j["test_csv"] = test_csv;
  }
  if (kind == "mnist") {
    j["mnist_dir"] = mnist_dir;
  }
  if (train_limit > 0) j["train_limit"] = train_limit;
  if (test_limit > 0) j["test_limit"] = test_limit;
  j["unit_ball"] = unit_ball;
  return j;
}

void DatasetSpec::apply_json(const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") kind = value.get<std::string>();
    else if (key == "n_per_class") n_per_class = value.get<int>();
    else if (key == "test_n_per_class") test_n_per_class = value.get<int>();
    else if (key == "dim") dim = value.get<int>();
    else if (key == "separation") separation = value.get<double>();
    else if (key == "outlier_frac") outlier_frac = value.get<double>();
    else if (key == "outlier_scale") outlier_scale = value.get<double>();
    else if (key == "train_csv") train_csv = value.get<std::string>();
    else if (key == "test_csv") test_csv = value.get<std::string>();
    else if (key == "mnist_dir") mnist_dir = value.get<std::string>();
    else if (key == "train_limit") train_limit = value.get<int>();
    else if (key == "test_limit") test_limit = value.get<int>();
    else if (key == "unit_ball") unit_ball = value.get<bool>();
    else throw ConfigError("unknown dataset key \"" + key + "\"");
  }
}

namespace {

constexpr std::uint64_t kTrainDataStream = 0xDA7A'0001ULL;
constexpr std::uint64_t kTestDataStream = 0xDA7A'0002ULL;

Dataset to_binary_labels(Dataset ds) {
  if (ds.label_kind == LabelKind::BinaryPM1) return ds;
  if (ds.num_classes != 2) {
    throw ConfigError("binary losses need two classes, dataset has " +
                      std::to_string(ds.num_classes));
  }
  for (auto& y : ds.labels) y = (y == 0) ? -1 : 1;
  if (ds.clean_labels) {
    for (auto& y : *ds.clean_labels) y = (y == 0) ? -1 : 1;
  }
  ds.label_kind = LabelKind::BinaryPM1;
  return ds;
}

}  // namespace

DatasetPair build_datasets(const DatasetSpec& spec, const LossSpec& loss, std::uint64_t seed) {
  DatasetPair pair;
  const std::uint64_t train_seed = mix_seed(seed, kTrainDataStream);
  const std::uint64_t test_seed = mix_seed(seed, kTestDataStream);

  if (spec.kind == "gaussians") {
    pair.train = gen_gaussians(spec.n_per_class, spec.dim, spec.separation, train_seed);
    pair.test = gen_gaussians(spec.test_n_per_class, spec.dim, spec.separation, test_seed);
  } else if (spec.kind == "outlier-gaussians") {
    pair.train = gen_outlier_gaussians(spec.n_per_class, spec.dim, spec.separation,
                                       spec.outlier_frac, spec.outlier_scale, train_seed);
    // Outliers are a training phenomenon; the test split stays clean.
    pair.test = gen_gaussians(spec.test_n_per_class, spec.dim, spec.separation, test_seed);
  } else if (spec.kind == "csv") {
    if (spec.train_csv.empty() || spec.test_csv.empty()) {
      throw ConfigError("csv dataset needs --train-csv and --test-csv");
    }
    pair.train = load_csv(spec.train_csv);
    pair.test = load_csv(spec.test_csv);
  } else if (spec.kind == "mnist") {
    pair.train = load_idx(spec.mnist_dir + "/train-images-idx3-ubyte",
                          spec.mnist_dir + "/train-labels-idx1-ubyte");
    pair.test = load_idx(spec.mnist_dir + "/t10k-images-idx3-ubyte",
                         spec.mnist_dir + "/t10k-labels-idx1-ubyte");
  } else {
    throw ConfigError("unknown dataset kind \"" + spec.kind + "\"");
  }

  if (spec.train_limit > 0 && spec.train_limit < pair.train.size()) {
    pair.train = head(pair.train, spec.train_limit);
  }
  if (spec.test_limit > 0 && spec.test_limit < pair.test.size()) {
    pair.test = head(pair.test, spec.test_limit);
  }

  if (loss.base != BaseLoss::SoftmaxCE) {
    pair.train = to_binary_labels(std::move(pair.train));
    pair.test = to_binary_labels(std::move(pair.test));
  } else if (pair.train.label_kind != LabelKind::ClassIndex) {
    throw ConfigError("softmax loss needs class-index labels");
  }

  if (spec.unit_ball) {
    pair.train = normalize_unit_ball(std::move(pair.train));
    // Apply the training scale to the test split so scores stay comparable.
    if (pair.train.provenance.unit_ball_scale > 1.0) {
      pair.test.X /= pair.train.provenance.unit_ball_scale;
      pair.test.provenance.unit_ball_scale = pair.train.provenance.unit_ball_scale;
    }
  }
  return pair;
}

nlohmann::json TrainParams::to_json() const {
  nlohmann::json j;
  j["loss"] = loss;
  j["e"] = e;
  j["c"] = c;
  j["grad_cap"] = grad_cap;
  j["optimizer"] = optimizer;
  j["learning_rate"] = learning_rate;
  j["batch_size"] = batch_size;
  j["epochs"] = epochs;
  j["warmup_frac"] = warmup_frac;
  j["hidden"] = hidden;
  j["bias"] = bias;
  if (projection_radius) j["projection_radius"] = *projection_radius;
  return j;
}

void TrainParams::apply_json(const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "loss") loss = value.get<std::string>();
    else if (key == "e") e = value.get<double>();
    else if (key == "c") c = value.get<double>();
    else if (key == "grad_cap") grad_cap = value.get<double>();
    else if (key == "optimizer") optimizer = value.get<std::string>();
    else if (key == "learning_rate") learning_rate = value.get<double>();
    else if (key == "batch_size") batch_size = value.get<int>();
    else if (key == "epochs") epochs = value.get<int>();
    else if (key == "warmup_frac") warmup_frac = value.get<double>();
    else if (key == "hidden") hidden = value.get<std::vector<int>>();
    else if (key == "bias") bias = value.get<bool>();
    else if (key == "projection_radius") projection_radius = value.get<double>();
    else throw ConfigError("unknown training key \"" + key + "\"");
  }
}

TrainConfig TrainParams::to_config(std::uint64_t seed) const {
  TrainConfig cfg;
  cfg.loss.base = base_loss_from_string(loss);
  cfg.loss.transform.e = e;
  cfg.loss.transform.c = c;
  cfg.loss.transform.grad_cap = grad_cap;
  cfg.optimizer.kind = optimizer_from_string(optimizer);
  cfg.optimizer.learning_rate = learning_rate;
  cfg.batch_size = batch_size;
  cfg.total_epochs = epochs;
  cfg.warmup_fraction = warmup_frac;
  cfg.model.hidden = hidden;
  cfg.model.with_bias = bias;
  cfg.projection_radius = projection_radius;
  cfg.seed = seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

nlohmann::json epoch_metrics_json(int epoch, const EpochMetrics& m) {
  return nlohmann::json{{"epoch", epoch},
                        {"train_loss", m.train_loss},
                        {"train_acc", m.train_acc},
                        {"test_acc", m.test_acc},
                        {"effective_e", m.effective_e}};
}

nlohmann::json trace_json(const TrainResult& result) {
  auto arr = nlohmann::json::array();
  for (std::size_t i = 0; i < result.epochs.size(); ++i) {
    auto j = epoch_metrics_json(static_cast<int>(i), result.epochs[i]);
    j["wall_seconds"] = result.epochs[i].wall_seconds;
    arr.push_back(std::move(j));
  }
  return arr;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace exploss::cli
