#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <variant>
#include <vector>

#include "exploss/rng.hpp"

namespace exploss {

// Linear scorer w . x. When has_bias is set, the last entry of w multiplies
// an implicit constant-1 feature, so inputs have dimension w.size() - 1.
struct LinearModel {
  Eigen::VectorXd w;
  bool has_bias = false;

  Eigen::Index feature_dim() const { return w.size() - (has_bias ? 1 : 0); }
  double score(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd score_batch(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

// Rescales w onto the radius-M ball when its norm exceeds M; idempotent.
LinearModel project_to_ball(LinearModel model, double radius);

struct DenseLayer {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;
};

// Fully connected net with ReLU between layers and a linear output layer.
struct MlpModel {
  std::vector<DenseLayer> layers;

  Eigen::Index input_dim() const { return layers.front().W.cols(); }
  Eigen::Index output_dim() const { return layers.back().W.rows(); }
  Eigen::VectorXd forward(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd forward_batch(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

// Pre-activation cache from a forward pass, consumed by mlp_backward.
struct MlpTrace {
  std::vector<Eigen::MatrixXd> act;  // act[0] = input, act[i] = ReLU output of layer i-1
  std::vector<Eigen::MatrixXd> pre;  // pre[i] = affine output of layer i
};

struct MlpGrads {
  std::vector<DenseLayer> layers;  // same shapes as the model
};

// Batch forward keeping the activations needed for the backward pass.
// Rows of X are samples; returns the N x out score matrix (== pre.back()).
Eigen::MatrixXd mlp_forward_cached(const MlpModel& model,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X, MlpTrace& trace);

// Exact gradients of sum_i loss_i w.r.t. every parameter, given the
// upstream d loss / d scores matrix. ReLU subgradient at 0 is 0.
void mlp_backward(const MlpModel& model, const MlpTrace& trace,
                  const Eigen::Ref<const Eigen::MatrixXd>& upstream, MlpGrads& grads);

// sign(score) with sign(0) = +1; returns -1 or +1.
int predict_binary(double score);

// argmax over logits, ties broken by the lowest class index.
int predict_class(const Eigen::Ref<const Eigen::RowVectorXd>& logits);

using Model = std::variant<LinearModel, MlpModel>;

// Seeded uniform init in [-a, a] with a = sqrt(6 / (fan_in + fan_out)).
LinearModel init_linear(int feature_dim, bool with_bias, Rng& rng);
MlpModel init_mlp(const std::vector<int>& dims, Rng& rng);  // dims = {in, hidden..., out}

Eigen::MatrixXd model_scores(const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& X);
std::vector<int> model_predict(const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                               bool binary_labels);

// Checkpoint document: shape header plus row-major parameter arrays.
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& doc);

}  // namespace exploss
