#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

#include "exploss/transform.hpp"

namespace exploss {

enum class BaseLoss { Logistic, Hinge, SoftmaxCE };

const char* to_string(BaseLoss base);
BaseLoss base_loss_from_string(std::string_view name);  // throws std::invalid_argument

// A base convex loss together with the score transform applied before it.
// transform.e == 1 reproduces the untransformed base loss exactly.
struct LossSpec {
  BaseLoss base = BaseLoss::Logistic;
  TransformParams transform;

  void validate() const;
};

struct LossEval {
  double value = 0.0;
  std::vector<double> grad;  // d value / d raw score(s); length 1 binary, K multiclass
};

// Margin-form helpers for the binary losses. m = y * score.
// Logistic: ln(1 + exp(-m)), evaluated in overflow-safe form.
// Hinge: max(0, 1 - m), subgradient 0 at the kink m == 1.
double binary_margin_value(BaseLoss base, double margin);
double binary_margin_dloss(BaseLoss base, double margin);

// Per-sample binary loss with the transform applied to the raw score.
// label must be -1 or +1; the gradient is w.r.t. the raw score.
LossEval binary_loss(const LossSpec& spec, double yhat, int label);

// Multiclass softmax cross-entropy over transformed logits. The transform is
// applied elementwise to each logit before the (numerically stable) softmax,
// and the gradient w.r.t. raw logit k carries the factor sigma_deriv(logit_k).
LossEval softmax_ce_loss(const LossSpec& spec, std::span<const double> logits, int label);

// Allocation-free core of softmax_ce_loss used by the training loop;
// grad_out may be null. Returns the loss value.
double softmax_ce_row(const LossSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& logits,
                      int label, Eigen::RowVectorXd* grad_out);

// Mean per-sample loss over a score matrix. Binary losses expect one score
// column and labels in {-1, +1}; SoftmaxCE expects K columns and class
// indices. Throws std::invalid_argument on empty input or shape mismatch.
double empirical_risk(const LossSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& scores,
                      const std::vector<int>& labels);

// Upper bound on the loss at score zero: ln 2 (logistic), 1 (hinge),
// ln K (softmax). Used as the C_l constant in the confidence calculators.
double loss_at_zero_bound(BaseLoss base, int num_classes = 2);

}  // namespace exploss
