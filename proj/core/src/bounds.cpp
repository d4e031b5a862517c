#include "exploss/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "exploss/rng.hpp"
#include "exploss/transform.hpp"

namespace exploss {

void BoundQuery::validate() const {
  if (!(sample_count > 0)) throw std::invalid_argument("BoundQuery: N must be > 0");
  if (!(dim >= 1)) throw std::invalid_argument("BoundQuery: d must be >= 1");
  if (!(weight_radius >= 1.0)) throw std::invalid_argument("BoundQuery: M must be >= 1");
  if (!(epsilon > 0)) throw std::invalid_argument("BoundQuery: epsilon must be > 0");
  if (!(loss_lipschitz > 0)) throw std::invalid_argument("BoundQuery: L_l must be > 0");
  if (!(loss_at_zero > 0)) throw std::invalid_argument("BoundQuery: C_l must be > 0");
  if (!lipschitz_in_small) throw std::invalid_argument("BoundQuery: missing L_R function");
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["epsilon_effective"] = epsilon_effective;
  j["confidence"] = confidence;  // serialized as null when -inf; see log_failure_term
  j["vacuous"] = vacuous;
  j["B"] = b_constant;
  j["covering_radius"] = std::isfinite(covering_radius) ? nlohmann::json(covering_radius)
                                                        : nlohmann::json();
  j["log_covering_count"] = log_covering_count;
  j["log_failure_term"] = log_failure_term;
  if (eps_prime) j["eps_prime"] = *eps_prime;
  j["query"] = echo;
  return j;
}

double covering_number_ball_log(double weight_radius, double covering_radius, double dim) {
  if (!(weight_radius > 0) || !(dim > 0)) {
    throw std::invalid_argument("covering_number_ball_log: M and d must be > 0");
  }
  if (!(covering_radius > 0)) {
    throw std::invalid_argument("covering_number_ball_log: radius must be > 0");
  }
  if (covering_radius > weight_radius) return 0.0;  // one ball suffices
  return dim * std::log1p(2.0 * weight_radius / covering_radius);
}

namespace {

// Margin kink of the hinge after the transform: sigma(delta) == 1.
double hinge_kink_after_transform(const TransformParams& p) {
  if (p.c <= 1.0) return 1.0;              // power branch: delta^e == 1
  return std::pow(p.c, 1.0 - p.e);         // linear branch: c^(e-1) delta == 1
}

double margin_dloss_times_sigma_deriv(const LossSpec& spec, double delta) {
  return binary_margin_dloss(spec.base, sigma(delta, spec.transform)) *
         sigma_deriv(delta, spec.transform);
}

}  // namespace

double lipschitz_small_uniform(const LossSpec& spec, double margin_range, long quad_points) {
  if (spec.base == BaseLoss::SoftmaxCE) {
    throw std::invalid_argument("lipschitz_small_uniform: requires a margin loss");
  }
  spec.validate();
  if (!(margin_range > 0)) throw std::invalid_argument("lipschitz_small_uniform: M must be > 0");
  if (quad_points < 1000) throw std::invalid_argument("lipschitz_small_uniform: too few points");

  const double M = margin_range;
  std::vector<double> cuts{-M, M};
  const double c = spec.transform.c;
  if (c > 0.0 && c < M) {
    cuts.push_back(-c);
    cuts.push_back(c);
  }
  if (spec.base == BaseLoss::Hinge) {
    const double k = hinge_kink_after_transform(spec.transform);
    if (k < M) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());

  double integral = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p];
    const double b = cuts[p + 1];
    const double len = b - a;
    if (len <= 0.0) continue;
    const long n_ivals =
        std::max<long>(8, std::lround(static_cast<double>(quad_points) * len / (2.0 * M)));
    const double h = len / static_cast<double>(n_ivals);
    // Panel endpoints are one-sided limits of a piecewise integrand; nudging
    // inward evaluates the branch that holds on the panel interior.
    const double nudge = std::min(1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)}), 0.25 * h);
    double sum = 0.5 * (margin_dloss_times_sigma_deriv(spec, a + nudge) +
                        margin_dloss_times_sigma_deriv(spec, b - nudge));
    for (long i = 1; i < n_ivals; ++i) {
      sum += margin_dloss_times_sigma_deriv(spec, a + h * static_cast<double>(i));
    }
    integral += h * sum;
  }
  return std::fabs(integral) / (2.0 * M);
}

double eps_prime_fixed_point(const std::function<double(double)>& lipschitz_in_small,
                             double epsilon) {
  if (!(epsilon > 0)) throw std::invalid_argument("eps_prime_fixed_point: epsilon must be > 0");
  if (!lipschitz_in_small) throw std::invalid_argument("eps_prime_fixed_point: missing L_R");
  for (double x = 1e-8 * epsilon; x < epsilon; x *= 1.05) {
    const double needed = std::min(epsilon, epsilon / (4.0 * lipschitz_in_small(x)));
    if (x >= needed) return x;
  }
  return epsilon;  // min{eps, .} <= eps, so eps always satisfies the condition
}

namespace {

BoundReport finish_report(BoundReport report, const BoundQuery& q, double log_cplus) {
  const double exponent =
      q.sample_count * q.epsilon * q.epsilon / (8.0 * report.b_constant * report.b_constant);
  report.log_failure_term = std::log(2.0) + log_cplus - exponent;
  report.confidence = 1.0 - std::exp(report.log_failure_term);  // may be -inf, never clamped
  report.vacuous = !(report.confidence > 0.0);
  report.echo = nlohmann::json{{"N", q.sample_count},
                               {"d", q.dim},
                               {"M", q.weight_radius},
                               {"epsilon", q.epsilon},
                               {"L_l", q.loss_lipschitz},
                               {"C_l", q.loss_at_zero},
                               {"estimator", q.estimator}};
  return report;
}

}  // namespace

BoundReport confidence_small_lipschitz(const BoundQuery& q) {
  q.validate();
  BoundReport report;
  report.method = "small-lipschitz";
  const double lr_at_m = q.lipschitz_in_small(q.weight_radius);
  if (!(lr_at_m >= 0)) throw std::invalid_argument("confidence_small_lipschitz: L_R(M) < 0");
  report.b_constant = lr_at_m * q.weight_radius + q.loss_at_zero;
  const double ep = eps_prime_fixed_point(q.lipschitz_in_small, q.epsilon);
  report.eps_prime = ep;
  report.covering_radius = q.epsilon / (4.0 * q.lipschitz_in_small(ep));
  report.log_covering_count =
      covering_number_ball_log(q.weight_radius, report.covering_radius, q.dim);
  report.epsilon_effective =
      q.epsilon + q.loss_lipschitz * q.epsilon * q.epsilon / (2.0 * report.b_constant);
  // failure term uses C + 1 in the union bound
  const double log_cplus =
      report.log_covering_count + std::log1p(std::exp(-report.log_covering_count));
  return finish_report(std::move(report), q, log_cplus);
}

BoundReport confidence_global_lipschitz(const BoundQuery& q) {
  q.validate();
  BoundReport report;
  report.method = "global-lipschitz";
  report.b_constant = q.loss_lipschitz * q.weight_radius + q.loss_at_zero;
  report.covering_radius = q.epsilon / (4.0 * q.loss_lipschitz);
  report.log_covering_count =
      covering_number_ball_log(q.weight_radius, report.covering_radius, q.dim);
  report.epsilon_effective = q.epsilon;
  return finish_report(std::move(report), q, report.log_covering_count);
}

namespace {

Eigen::VectorXd random_in_ball(int dim, double radius, Rng& rng) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  const double norm = v.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(dim);
  const double r = radius * std::pow(rng.next_canonical(), 1.0 / static_cast<double>(dim));
  return v * (r / norm);
}

Eigen::VectorXd random_direction(int dim, Rng& rng) {
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

}  // namespace

LipschitzEstimate lipschitz_small_mc(const std::function<double(const Eigen::VectorXd&)>& risk,
                                     double epsilon, double weight_radius, int dim, int n_pairs,
                                     std::uint64_t seed) {
  if (!risk) throw std::invalid_argument("lipschitz_small_mc: missing risk oracle");
  if (n_pairs < 1) throw std::invalid_argument("lipschitz_small_mc: n_pairs must be >= 1");
  if (!(epsilon > 0) || !(weight_radius > 0) || dim < 1) {
    throw std::invalid_argument("lipschitz_small_mc: bad epsilon/M/dim");
  }

  double best = 0.0;
  for (int i = 0; i < n_pairs; ++i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd w1 = random_in_ball(dim, weight_radius, rng);
    const double step = epsilon * (1.0 - rng.next_canonical());  // (0, epsilon]
    Eigen::VectorXd w2 = w1 + step * random_direction(dim, rng);
    const double norm = w2.norm();
    if (norm > weight_radius) w2 *= weight_radius / norm;  // projection is non-expansive
    const double dist = (w1 - w2).norm();
    if (dist < 1e-15) continue;
    best = std::max(best, std::fabs(risk(w1) - risk(w2)) / dist);
  }
  return {best, n_pairs};
}

nlohmann::json TwoGaussianSpec::to_json() const {
  return nlohmann::json{
      {"kind", "two_gaussians"},
      {"dim", dim},
      {"separation", separation},
      {"clip_to_unit_ball", clip_to_unit_ball},
  };
}

void Lemma2Spec::validate() const {
  loss.validate();
  if (loss.base == BaseLoss::SoftmaxCE) {
    throw std::invalid_argument("lemma2_mc_check: requires a binary margin loss");
  }
  if (dist.dim < 1 || !(dist.separation >= 0)) {
    throw std::invalid_argument("lemma2_mc_check: bad distribution spec");
  }
  if (w1.size() != dist.dim || w2.size() != dist.dim) {
    throw std::invalid_argument("lemma2_mc_check: weight dims do not match the distribution");
  }
  if (!(epsilon > 0) || !(rho > 0)) {
    throw std::invalid_argument("lemma2_mc_check: epsilon and rho must be > 0");
  }
  if ((w1 - w2).norm() > epsilon * (1.0 + 1e-12)) {
    throw std::invalid_argument("lemma2_mc_check: ||w1 - w2|| exceeds the declared epsilon");
  }
  if (!(loss_lipschitz > 0)) throw std::invalid_argument("lemma2_mc_check: L_l must be > 0");
  if (sample_count < 1) throw std::invalid_argument("lemma2_mc_check: N must be >= 1");
  if (trials < 1000) throw std::invalid_argument("lemma2_mc_check: trials must be >= 1000");
  if (ref_samples < 1000) throw std::invalid_argument("lemma2_mc_check: ref_samples too small");
}

namespace {

// One draw from the two-Gaussian mixture; returns the margin pair
// (w1 . x, w2 . x) with the label folded in.
struct MixtureSampler {
  const TwoGaussianSpec& dist;
  const Eigen::VectorXd& w1;
  const Eigen::VectorXd& w2;
  Eigen::VectorXd x;

  explicit MixtureSampler(const Lemma2Spec& spec)
      : dist(spec.dist), w1(spec.w1), w2(spec.w2), x(spec.dist.dim) {}

  // z = loss(w1 . x, y) - loss(w2 . x, y) for one sample
  double delta_loss(const LossSpec& loss, Rng& rng) {
    const double y = rng.below(2) == 0 ? 1.0 : -1.0;
    for (int i = 0; i < dist.dim; ++i) x[i] = rng.normal();
    x[0] += y * dist.separation / 2.0;
    if (dist.clip_to_unit_ball) {
      const double norm = x.norm();
      if (norm > 1.0) x /= norm;
    }
    const double m1 = y * sigma(w1.dot(x), loss.transform);
    const double m2 = y * sigma(w2.dot(x), loss.transform);
    return binary_margin_value(loss.base, m1) - binary_margin_value(loss.base, m2);
  }
};

constexpr std::uint64_t kRefStream = 0xFEEDull;

}  // namespace

Lemma2Report lemma2_mc_check(const Lemma2Spec& spec) {
  spec.validate();

  Lemma2Report report;

  // Reference risk gap from a dedicated large sample, with its spread.
  {
    Rng rng = Rng::substream(spec.seed, kRefStream);
    MixtureSampler sampler(spec);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long i = 0; i < spec.ref_samples; ++i) {
      const double z = sampler.delta_loss(spec.loss, rng);
      sum += z;
      sum_sq += z * z;
    }
    const double n = static_cast<double>(spec.ref_samples);
    report.ref_gap = sum / n;
    const double var = std::max(0.0, sum_sq / n - report.ref_gap * report.ref_gap);
    report.ref_standard_error = std::sqrt(var / n);
  }

  int violations = 0;
  for (int t = 0; t < spec.trials; ++t) {
    Rng rng = Rng::substream(spec.seed, 1000 + static_cast<std::uint64_t>(t));
    MixtureSampler sampler(spec);
    double sum = 0.0;
    for (int i = 0; i < spec.sample_count; ++i) sum += sampler.delta_loss(spec.loss, rng);
    const double empirical_gap = sum / static_cast<double>(spec.sample_count);
    if (std::fabs(report.ref_gap - empirical_gap) >= spec.rho) ++violations;
  }

  report.violations = violations;
  report.frequency = static_cast<double>(violations) / static_cast<double>(spec.trials);
  report.bound = 2.0 * std::exp(-(spec.sample_count * spec.rho * spec.rho) /
                                (2.0 * spec.loss_lipschitz * spec.loss_lipschitz * spec.epsilon *
                                 spec.epsilon));
  report.slack = 4.0 * std::sqrt(0.25 / static_cast<double>(spec.trials));
  report.pass = report.frequency <= report.bound + report.slack;
  return report;
}

nlohmann::json Lemma2Report::to_json() const {
  return nlohmann::json{
      {"frequency", frequency}, {"bound", bound},
      {"slack", slack},         {"pass", pass},
      {"violations", violations},
      {"ref_gap", ref_gap},     {"ref_standard_error", ref_standard_error},
  };
}

}  // namespace exploss
