#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace exploss {

enum class LabelKind { BinaryPM1, ClassIndex };
enum class NormState { Raw, UnitBall };

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Where a dataset came from and what was done to it; serialized into every
// result document.
struct Provenance {
  std::string source;
  std::uint64_t seed = 0;
  double noise_rate = 0.0;
  std::uint64_t noise_seed = 0;
  std::optional<double> bayes_accuracy;
  double unit_ball_scale = 1.0;
  std::vector<int> outlier_indices;

  nlohmann::json to_json() const;
};

struct Dataset {
  Eigen::MatrixXd X;  // N x d, one sample per row
  std::vector<int> labels;
  LabelKind label_kind = LabelKind::BinaryPM1;
  int num_classes = 2;
  std::optional<std::vector<int>> clean_labels;  // retained after corruption
  NormState norm_state = NormState::Raw;
  Provenance provenance;

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
  void validate() const;  // throws std::invalid_argument on broken invariants
};

// Two isotropic unit-variance Gaussians at +/-(separation/2) e1 with labels
// +/-1. The closed-form Bayes accuracy Phi(separation/2) is recorded in
// provenance.
Dataset gen_gaussians(int n_per_class, int d, double separation, std::uint64_t seed);

// gen_gaussians plus round(outlier_frac * N) points moved to the wrong side
// at outlier_scale times the class-mean distance while keeping their labels.
// Outlier indices are recorded; outlier_frac == 0 reproduces gen_gaussians
// bit-for-bit at the same seed.
Dataset gen_outlier_gaussians(int n_per_class, int d, double separation, double outlier_frac,
                              double outlier_scale, std::uint64_t seed);

// Symmetric label noise: each label independently, with the given rate, is
// replaced by a uniform draw over the other K-1 classes, so the expected
// corrupted fraction equals the rate. Original labels are kept in
// clean_labels. rate >= 1 throws std::domain_error.
Dataset inject_symmetric_noise(Dataset ds, double rate, int num_classes, std::uint64_t seed);

// Restores clean_labels (if present) and clears the noise bookkeeping.
Dataset restore_clean_labels(Dataset ds);

// Divides all rows by the max row norm when it exceeds 1 and records the
// scale; idempotent.
Dataset normalize_unit_ball(Dataset ds);

// IDX files (big-endian, magic 0x00000801 labels / 0x00000803 images).
// Pixels are scaled to [0, 1] and images flattened row-major. Malformed
// input throws ParseError naming the byte offset.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// CSV with a mandatory header, comma separator, '.' decimal; the label is
// the last column and class indices are inferred from the label values.
Dataset load_csv(const std::string& path);

// First n rows (n <= size), keeping metadata.
Dataset head(const Dataset& ds, int n);

}  // namespace exploss
