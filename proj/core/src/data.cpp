#include "exploss/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "exploss/rng.hpp"

namespace exploss {

nlohmann::json Provenance::to_json() const {
  nlohmann::json j;
  j["source"] = source;
  j["seed"] = seed;
  j["noise_rate"] = noise_rate;
  j["noise_seed"] = noise_seed;
  if (bayes_accuracy) j["bayes_accuracy"] = *bayes_accuracy;
  j["unit_ball_scale"] = unit_ball_scale;
  if (!outlier_indices.empty()) j["outlier_indices"] = outlier_indices;
  return j;
}

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("Dataset: empty feature matrix");
  if (static_cast<Eigen::Index>(labels.size()) != X.rows()) {
    throw std::invalid_argument("Dataset: labels/rows mismatch");
  }
  for (int y : labels) {
    if (label_kind == LabelKind::BinaryPM1) {
      if (y != 1 && y != -1) throw std::invalid_argument("Dataset: binary label not in {-1,+1}");
    } else if (y < 0 || y >= num_classes) {
      throw std::invalid_argument("Dataset: class index out of range");
    }
  }
  if (clean_labels && clean_labels->size() != labels.size()) {
    throw std::invalid_argument("Dataset: clean_labels size mismatch");
  }
  if (norm_state == NormState::UnitBall) {
    const double max_norm = X.rowwise().norm().maxCoeff();
    if (max_norm > 1.0 + 1e-12) {
      throw std::invalid_argument("Dataset: unit-ball state but max row norm " +
                                  std::to_string(max_norm));
    }
  }
}

namespace {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void fill_gaussian_row(Eigen::MatrixXd& X, Eigen::Index row, double mean_x1, Rng& rng) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) X(row, j) = rng.normal();
  X(row, 0) += mean_x1;
}

}  // namespace

Dataset gen_gaussians(int n_per_class, int d, double separation, std::uint64_t seed) {
  if (n_per_class < 1) throw std::invalid_argument("gen_gaussians: n_per_class must be >= 1");
  if (d < 2) throw std::invalid_argument("gen_gaussians: d must be >= 2");
  if (!(separation >= 0.0)) throw std::invalid_argument("gen_gaussians: separation must be >= 0");

  Rng rng(seed);
  const Eigen::Index n = 2 * static_cast<Eigen::Index>(n_per_class);
  Dataset ds;
  ds.X.resize(n, d);
  ds.labels.resize(static_cast<std::size_t>(n));
  const double half = separation / 2.0;
  for (int i = 0; i < n_per_class; ++i) {
    fill_gaussian_row(ds.X, i, half, rng);
    ds.labels[static_cast<std::size_t>(i)] = 1;
  }
  for (int i = 0; i < n_per_class; ++i) {
    fill_gaussian_row(ds.X, n_per_class + i, -half, rng);
    ds.labels[static_cast<std::size_t>(n_per_class + i)] = -1;
  }
  ds.label_kind = LabelKind::BinaryPM1;
  ds.num_classes = 2;
  std::ostringstream src;
  src << "gaussians(n_per_class=" << n_per_class << ",d=" << d << ",separation=" << separation
      << ")";
  ds.provenance.source = src.str();
  ds.provenance.seed = seed;
  ds.provenance.bayes_accuracy = standard_normal_cdf(half);
  return ds;
}

Dataset gen_outlier_gaussians(int n_per_class, int d, double separation, double outlier_frac,
                              double outlier_scale, std::uint64_t seed) {
  if (!(outlier_frac >= 0.0 && outlier_frac < 0.5)) {
    throw std::invalid_argument("gen_outlier_gaussians: outlier_frac must lie in [0, 0.5)");
  }
  if (outlier_frac > 0.0 && !(outlier_scale > 1.0)) {
    throw std::invalid_argument("gen_outlier_gaussians: outlier_scale must be > 1");
  }
  Dataset ds = gen_gaussians(n_per_class, d, separation, seed);
  const Eigen::Index n = ds.size();
  const int n_out = static_cast<int>(std::lround(outlier_frac * static_cast<double>(n)));
  if (n_out == 0) return ds;

  // Separate stream so the base points match gen_gaussians exactly.
  Rng rng = Rng::substream(seed, 0x0417u);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  fisher_yates(order, rng);
  std::vector<int> chosen(order.begin(), order.begin() + n_out);
  std::sort(chosen.begin(), chosen.end());

  const double half = separation / 2.0;
  for (int idx : chosen) {
    const double y = static_cast<double>(ds.labels[static_cast<std::size_t>(idx)]);
    fill_gaussian_row(ds.X, idx, -y * outlier_scale * half, rng);
  }
  ds.provenance.outlier_indices = chosen;
  std::ostringstream src;
  src << "outlier_gaussians(n_per_class=" << n_per_class << ",d=" << d
      << ",separation=" << separation << ",outlier_frac=" << outlier_frac
      << ",outlier_scale=" << outlier_scale << ")";
  ds.provenance.source = src.str();
  return ds;
}

Dataset inject_symmetric_noise(Dataset ds, double rate, int num_classes, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::domain_error("inject_symmetric_noise: rate must lie in [0, 1)");
  }
  if (ds.label_kind == LabelKind::BinaryPM1) {
    if (num_classes != 2) {
      throw std::invalid_argument("inject_symmetric_noise: binary labels require K == 2");
    }
  } else {
    if (num_classes != ds.num_classes) {
      throw std::invalid_argument("inject_symmetric_noise: K does not match dataset");
    }
    for (int y : ds.labels) {
      if (y < 0 || y >= num_classes) {
        throw std::invalid_argument("inject_symmetric_noise: label out of range for K");
      }
    }
  }

  if (!ds.clean_labels) ds.clean_labels = ds.labels;
  Rng rng(seed);
  for (auto& y : ds.labels) {
    if (rng.next_canonical() >= rate) continue;
    if (ds.label_kind == LabelKind::BinaryPM1) {
      y = -y;
    } else {
      // Uniform over the other K-1 classes; never flips to itself.
      int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_classes - 1)));
      y = (r >= y) ? r + 1 : r;
    }
  }
  ds.provenance.noise_rate = rate;
  ds.provenance.noise_seed = seed;
  return ds;
}

Dataset restore_clean_labels(Dataset ds) {
  if (ds.clean_labels) {
    ds.labels = *ds.clean_labels;
    ds.clean_labels.reset();
    ds.provenance.noise_rate = 0.0;
    ds.provenance.noise_seed = 0;
  }
  return ds;
}

Dataset normalize_unit_ball(Dataset ds) {
  if (ds.size() < 1) throw std::invalid_argument("normalize_unit_ball: empty dataset");
  const double max_norm = ds.X.rowwise().norm().maxCoeff();
  if (max_norm > 1.0) {
    ds.X /= max_norm;
    ds.provenance.unit_ball_scale *= max_norm;
  }
  ds.norm_state = NormState::UnitBall;
  return ds;
}

namespace {

std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

std::uint32_t read_u32_be(const std::vector<unsigned char>& b, std::size_t off,
                          const std::string& path) {
  if (off + 4 > b.size()) {
    throw ParseError(path + ": truncated at byte " + std::to_string(off) + ", expected " +
                     std::to_string(off + 4) + " bytes, got " + std::to_string(b.size()));
  }
  return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
         (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const auto img = read_file_bytes(images_path);
  const std::uint32_t img_magic = read_u32_be(img, 0, images_path);
  if (img_magic != 0x00000803u) {
    throw ParseError(images_path + ": bad magic at byte 0 (expected 0x00000803)");
  }
  const std::uint32_t n = read_u32_be(img, 4, images_path);
  const std::uint32_t rows = read_u32_be(img, 8, images_path);
  const std::uint32_t cols = read_u32_be(img, 12, images_path);
  const std::size_t expected = 16 + std::size_t(n) * rows * cols;
  if (img.size() != expected) {
    throw ParseError(images_path + ": expected " + std::to_string(expected) + " bytes, got " +
                     std::to_string(img.size()));
  }

  const auto lab = read_file_bytes(labels_path);
  const std::uint32_t lab_magic = read_u32_be(lab, 0, labels_path);
  if (lab_magic != 0x00000801u) {
    throw ParseError(labels_path + ": bad magic at byte 0 (expected 0x00000801)");
  }
  const std::uint32_t n_lab = read_u32_be(lab, 4, labels_path);
  if (lab.size() != 8 + std::size_t(n_lab)) {
    throw ParseError(labels_path + ": expected " + std::to_string(8 + std::size_t(n_lab)) +
                     " bytes, got " + std::to_string(lab.size()));
  }
  if (n_lab != n) {
    throw ParseError(labels_path + ": " + std::to_string(n_lab) + " labels for " +
                     std::to_string(n) + " images");
  }
  if (n == 0) throw ParseError(images_path + ": no images");

  Dataset ds;
  const Eigen::Index d = static_cast<Eigen::Index>(rows) * static_cast<Eigen::Index>(cols);
  ds.X.resize(n, d);
  ds.labels.resize(n);
  int max_label = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::size_t base = 16 + std::size_t(i) * rows * cols;
    for (Eigen::Index j = 0; j < d; ++j) {
      ds.X(i, j) = double(img[base + static_cast<std::size_t>(j)]) / 255.0;
    }
    ds.labels[i] = int(lab[8 + i]);
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.label_kind = LabelKind::ClassIndex;
  ds.num_classes = std::max(2, max_label + 1);
  ds.provenance.source = "idx(" + images_path + "," + labels_path + ")";
  return ds;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": missing header row");

  const auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };

  const std::size_t n_cols = split(line).size();
  if (n_cols < 2) throw ParseError(path + ": header must name at least one feature and a label");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t line_no = 1;
  bool saw_minus_one = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != n_cols) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(n_cols) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row(n_cols - 1);
    for (std::size_t j = 0; j + 1 < n_cols; ++j) {
      std::size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(cells[j], &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != cells[j].size() || cells[j].empty()) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": non-numeric cell \"" +
                         cells[j] + "\" in column " + std::to_string(j + 1));
      }
      row[j] = v;
    }
    const std::string& lab = cells[n_cols - 1];
    std::size_t pos = 0;
    long y = 0;
    try {
      y = std::stol(lab, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != lab.size() || lab.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": non-integer label \"" + lab +
                       "\"");
    }
    if (y == -1) saw_minus_one = true;
    labels.push_back(static_cast<int>(y));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_cols - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < n_cols; ++j) ds.X(static_cast<Eigen::Index>(i),
                                                      static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  ds.labels = std::move(labels);
  if (saw_minus_one) {
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
      if (ds.labels[i] != 1 && ds.labels[i] != -1) {
        throw ParseError(path + ": mixed label conventions (saw -1 and " +
                         std::to_string(ds.labels[i]) + ")");
      }
    }
    ds.label_kind = LabelKind::BinaryPM1;
    ds.num_classes = 2;
  } else {
    int max_label = 0;
    for (int y : ds.labels) {
      if (y < 0) throw ParseError(path + ": negative class index " + std::to_string(y));
      max_label = std::max(max_label, y);
    }
    ds.label_kind = LabelKind::ClassIndex;
    ds.num_classes = std::max(2, max_label + 1);
  }
  ds.provenance.source = "csv(" + path + ")";
  return ds;
}

Dataset head(const Dataset& ds, int n) {
  if (n < 1 || n > ds.size()) throw std::invalid_argument("head: n out of range");
  Dataset out = ds;
  out.X = ds.X.topRows(n);
  out.labels.assign(ds.labels.begin(), ds.labels.begin() + n);
  if (ds.clean_labels) {
    out.clean_labels = std::vector<int>(ds.clean_labels->begin(), ds.clean_labels->begin() + n);
  }
  out.provenance.source = ds.provenance.source + "[0:" + std::to_string(n) + "]";
  return out;
}

}  // namespace exploss
