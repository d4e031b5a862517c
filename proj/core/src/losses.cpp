#include "exploss/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exploss {

const char* to_string(BaseLoss base) {
  switch (base) {
    case BaseLoss::Logistic: return "logistic";
    case BaseLoss::Hinge: return "hinge";
    case BaseLoss::SoftmaxCE: return "softmax";
  }
  return "?";
}

BaseLoss base_loss_from_string(std::string_view name) {
  if (name == "logistic") return BaseLoss::Logistic;
  if (name == "hinge") return BaseLoss::Hinge;
  if (name == "softmax") return BaseLoss::SoftmaxCE;
  throw std::invalid_argument("unknown loss \"" + std::string(name) +
                              "\", expected logistic|hinge|softmax");
}

void LossSpec::validate() const { transform.validate(); }

double binary_margin_value(BaseLoss base, double m) {
  switch (base) {
    case BaseLoss::Logistic:
      // ln(1 + e^-m) = max(-m, 0) + log1p(e^-|m|)
      return std::max(-m, 0.0) + std::log1p(std::exp(-std::fabs(m)));
    case BaseLoss::Hinge:
      return std::max(0.0, 1.0 - m);
    default:
      throw std::invalid_argument("binary loss requires logistic or hinge");
  }
}

double binary_margin_dloss(BaseLoss base, double m) {
  switch (base) {
    case BaseLoss::Logistic:
      // d/dm ln(1 + e^-m) = -1 / (1 + e^m), overflow-safe both directions
      if (m >= 0.0) {
        const double t = std::exp(-m);
        return -t / (1.0 + t);
      }
      return -1.0 / (1.0 + std::exp(m));
    case BaseLoss::Hinge:
      return (1.0 - m > 0.0) ? -1.0 : 0.0;
    default:
      throw std::invalid_argument("binary loss requires logistic or hinge");
  }
}

LossEval binary_loss(const LossSpec& spec, double yhat, int label) {
  if (label != 1 && label != -1) {
    throw std::domain_error("binary loss: label must be -1 or +1, got " + std::to_string(label));
  }
  if (spec.base == BaseLoss::SoftmaxCE) {
    throw std::invalid_argument("binary loss requires logistic or hinge");
  }
  const double s = sigma(yhat, spec.transform);
  const double m = static_cast<double>(label) * s;
  LossEval out;
  out.value = binary_margin_value(spec.base, m);
  // chain rule through the transform: dl/dyhat = dl/dm * y * sigma'(yhat)
  out.grad = {binary_margin_dloss(spec.base, m) * static_cast<double>(label) *
              sigma_deriv(yhat, spec.transform)};
  return out;
}

double softmax_ce_row(const LossSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& logits,
                      int label, Eigen::RowVectorXd* grad_out) {
  const Eigen::Index k = logits.size();
  if (k < 2) throw std::invalid_argument("softmax loss requires K >= 2 logits");
  if (label < 0 || label >= k) {
    throw std::domain_error("softmax loss: label " + std::to_string(label) +
                            " out of range for K=" + std::to_string(k));
  }
  Eigen::RowVectorXd z(k);
  for (Eigen::Index i = 0; i < k; ++i) z[i] = sigma(logits[i], spec.transform);

  const double zmax = z.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) sum += std::exp(z[i] - zmax);
  const double lse = zmax + std::log(sum);
  const double value = lse - z[label];

  if (grad_out != nullptr) {
    grad_out->resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double p = std::exp(z[i] - lse);
      const double dz = p - (i == label ? 1.0 : 0.0);
      (*grad_out)[i] = dz * sigma_deriv(logits[i], spec.transform);
    }
  }
  return value;
}

LossEval softmax_ce_loss(const LossSpec& spec, std::span<const double> logits, int label) {
  if (spec.base != BaseLoss::SoftmaxCE) {
    throw std::invalid_argument("softmax_ce_loss requires base SoftmaxCE");
  }
  Eigen::RowVectorXd row = Eigen::Map<const Eigen::RowVectorXd>(logits.data(),
                                                                static_cast<Eigen::Index>(logits.size()));
  Eigen::RowVectorXd grad;
  LossEval out;
  out.value = softmax_ce_row(spec, row, label, &grad);
  out.grad.assign(grad.data(), grad.data() + grad.size());
  return out;
}

double empirical_risk(const LossSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& scores,
                      const std::vector<int>& labels) {
  const Eigen::Index n = scores.rows();
  if (n == 0) throw std::invalid_argument("empirical_risk: empty sample");
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw std::invalid_argument("empirical_risk: scores/labels size mismatch");
  }
  double total = 0.0;
  if (spec.base == BaseLoss::SoftmaxCE) {
    for (Eigen::Index i = 0; i < n; ++i) {
      total += softmax_ce_row(spec, scores.row(i), labels[i], nullptr);
    }
  } else {
    if (scores.cols() != 1) {
      throw std::invalid_argument("empirical_risk: binary losses expect one score column");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = labels[i];
      if (y != 1 && y != -1) {
        throw std::domain_error("empirical_risk: binary label must be -1 or +1");
      }
      const double m = static_cast<double>(y) * sigma(scores(i, 0), spec.transform);
      total += binary_margin_value(spec.base, m);
    }
  }
  return total / static_cast<double>(n);
}

double loss_at_zero_bound(BaseLoss base, int num_classes) {
  switch (base) {
    case BaseLoss::Logistic: return std::log(2.0);
    case BaseLoss::Hinge: return 1.0;
    case BaseLoss::SoftmaxCE:
      if (num_classes < 2) throw std::invalid_argument("loss_at_zero_bound: K must be >= 2");
      return std::log(static_cast<double>(num_classes));
  }
  throw std::invalid_argument("loss_at_zero_bound: unknown loss");
}

}  // namespace exploss
