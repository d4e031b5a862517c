#include "exploss/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exploss {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

double LinearModel::score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require(x.size() == feature_dim(), "LinearModel::score: expected dim " +
                                         std::to_string(feature_dim()) + ", got " +
                                         std::to_string(x.size()));
  double s = w.head(feature_dim()).dot(x);
  if (has_bias) s += w[w.size() - 1];
  return s;
}

Eigen::VectorXd LinearModel::score_batch(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  require(X.cols() == feature_dim(), "LinearModel::score_batch: feature dim mismatch");
  Eigen::VectorXd s = X * w.head(feature_dim());
  if (has_bias) s.array() += w[w.size() - 1];
  return s;
}

LinearModel project_to_ball(LinearModel model, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("project_to_ball: radius must be > 0");
  const double norm = model.w.norm();
  if (norm > radius) model.w *= radius / norm;
  return model;
}

Eigen::VectorXd MlpModel::forward(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require(!layers.empty(), "MlpModel::forward: empty model");
  require(x.size() == input_dim(), "MlpModel::forward: expected dim " +
                                       std::to_string(input_dim()) + ", got " +
                                       std::to_string(x.size()));
  Eigen::VectorXd a = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Eigen::VectorXd z = layers[i].W * a + layers[i].b;
    if (i + 1 < layers.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd MlpModel::forward_batch(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  MlpTrace trace;
  return mlp_forward_cached(*this, X, trace);
}

Eigen::MatrixXd mlp_forward_cached(const MlpModel& model,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X, MlpTrace& trace) {
  require(!model.layers.empty(), "mlp_forward_cached: empty model");
  require(X.cols() == model.input_dim(), "mlp_forward_cached: feature dim mismatch");
  const std::size_t L = model.layers.size();
  trace.act.assign(L, Eigen::MatrixXd());
  trace.pre.assign(L, Eigen::MatrixXd());
  trace.act[0] = X;
  for (std::size_t i = 0; i < L; ++i) {
    const Eigen::MatrixXd& in = trace.act[i];
    trace.pre[i] = (in * model.layers[i].W.transpose()).rowwise() + model.layers[i].b.transpose();
    if (i + 1 < L) trace.act[i + 1] = trace.pre[i].cwiseMax(0.0);
  }
  return trace.pre[L - 1];
}

void mlp_backward(const MlpModel& model, const MlpTrace& trace,
                  const Eigen::Ref<const Eigen::MatrixXd>& upstream, MlpGrads& grads) {
  const std::size_t L = model.layers.size();
  require(trace.pre.size() == L && trace.act.size() == L,
          "mlp_backward: trace does not match model");
  require(upstream.rows() == trace.pre[L - 1].rows() && upstream.cols() == trace.pre[L - 1].cols(),
          "mlp_backward: upstream shape mismatch");
  grads.layers.resize(L);
  Eigen::MatrixXd delta = upstream;
  for (std::size_t i = L; i-- > 0;) {
    grads.layers[i].W = delta.transpose() * trace.act[i];
    grads.layers[i].b = delta.colwise().sum().transpose();
    if (i > 0) {
      // ReLU subgradient: 1 where the pre-activation was > 0, else 0.
      delta = (delta * model.layers[i].W).array() *
              (trace.pre[i - 1].array() > 0.0).cast<double>();
    }
  }
}

int predict_binary(double score) { return score < 0.0 ? -1 : 1; }

int predict_class(const Eigen::Ref<const Eigen::RowVectorXd>& logits) {
  Eigen::Index best = 0;
  logits.maxCoeff(&best);  // first maximum -> lowest index on ties
  return static_cast<int>(best);
}

LinearModel init_linear(int feature_dim, bool with_bias, Rng& rng) {
  require(feature_dim >= 1, "init_linear: feature_dim must be >= 1");
  const double a = std::sqrt(6.0 / (feature_dim + 1.0));
  LinearModel m;
  m.has_bias = with_bias;
  m.w.resize(feature_dim + (with_bias ? 1 : 0));
  for (Eigen::Index i = 0; i < m.w.size(); ++i) m.w[i] = rng.uniform(-a, a);
  return m;
}

MlpModel init_mlp(const std::vector<int>& dims, Rng& rng) {
  require(dims.size() >= 2, "init_mlp: need at least input and output dims");
  MlpModel m;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    require(dims[i] >= 1 && dims[i + 1] >= 1, "init_mlp: dims must be positive");
    const int fan_in = dims[i];
    const int fan_out = dims[i + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    DenseLayer layer;
    layer.W.resize(fan_out, fan_in);
    layer.b = Eigen::VectorXd::Zero(fan_out);
    for (Eigen::Index r = 0; r < layer.W.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.W.cols(); ++c) layer.W(r, c) = rng.uniform(-a, a);
    }
    m.layers.push_back(std::move(layer));
  }
  return m;
}

Eigen::MatrixXd model_scores(const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    return lin->score_batch(X);
  }
  return std::get<MlpModel>(model).forward_batch(X);
}

std::vector<int> model_predict(const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                               bool binary_labels) {
  const Eigen::MatrixXd scores = model_scores(model, X);
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  if (binary_labels) {
    require(scores.cols() == 1, "model_predict: binary labels need one score column");
    for (Eigen::Index i = 0; i < scores.rows(); ++i) out[i] = predict_binary(scores(i, 0));
  } else {
    for (Eigen::Index i = 0; i < scores.rows(); ++i) out[i] = predict_class(scores.row(i));
  }
  return out;
}

nlohmann::json model_to_json(const Model& model) {
  nlohmann::json doc;
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    doc["kind"] = "linear";
    doc["has_bias"] = lin->has_bias;
    doc["dim"] = lin->w.size();
    doc["w"] = std::vector<double>(lin->w.data(), lin->w.data() + lin->w.size());
    return doc;
  }
  const auto& mlp = std::get<MlpModel>(model);
  doc["kind"] = "mlp";
  std::vector<Eigen::Index> dims{mlp.input_dim()};
  for (const auto& layer : mlp.layers) dims.push_back(layer.W.rows());
  doc["dims"] = dims;
  auto layers = nlohmann::json::array();
  for (const auto& layer : mlp.layers) {
    nlohmann::json lj;
    lj["rows"] = layer.W.rows();
    lj["cols"] = layer.W.cols();
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(layer.W.size()));
    for (Eigen::Index r = 0; r < layer.W.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.W.cols(); ++c) w.push_back(layer.W(r, c));
    }
    lj["w"] = std::move(w);
    lj["b"] = std::vector<double>(layer.b.data(), layer.b.data() + layer.b.size());
    layers.push_back(std::move(lj));
  }
  doc["layers"] = std::move(layers);
  return doc;
}

Model model_from_json(const nlohmann::json& doc) {
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "linear") {
    LinearModel m;
    m.has_bias = doc.at("has_bias").get<bool>();
    const auto w = doc.at("w").get<std::vector<double>>();
    m.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    return m;
  }
  if (kind == "mlp") {
    MlpModel m;
    for (const auto& lj : doc.at("layers")) {
      DenseLayer layer;
      const auto rows = lj.at("rows").get<Eigen::Index>();
      const auto cols = lj.at("cols").get<Eigen::Index>();
      const auto w = lj.at("w").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols) {
        throw std::invalid_argument("model_from_json: layer weight count mismatch");
      }
      layer.W.resize(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) layer.W(r, c) = w[static_cast<std::size_t>(r * cols + c)];
      }
      const auto b = lj.at("b").get<std::vector<double>>();
      layer.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
      m.layers.push_back(std::move(layer));
    }
    if (m.layers.empty()) throw std::invalid_argument("model_from_json: mlp with no layers");
    return m;
  }
  throw std::invalid_argument("model_from_json: unknown kind \"" + kind + "\"");
}

}  // namespace exploss
