#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "exploss/losses.hpp"

namespace exploss {

// Inputs shared by both confidence calculators. lipschitz_in_small maps a
// pair distance eps to L_R(eps), the slope constant of the expected risk
// valid for weight pairs at most eps apart; it must be nondecreasing.
struct BoundQuery {
  double sample_count = 0;      // N
  double dim = 1;               // d
  double weight_radius = 1.0;   // M, >= 1
  double epsilon = 0.1;
  double loss_lipschitz = 1.0;  // L_l, global slope bound of the loss
  double loss_at_zero = 1.0;    // C_l, with C_l >= l(0, y)
  std::function<double(double)> lipschitz_in_small;
  std::string estimator = "user-supplied";  // where lipschitz_in_small came from

  void validate() const;
};

struct BoundReport {
  std::string method;  // "small-lipschitz" or "global-lipschitz"
  double epsilon_effective = 0.0;
  double confidence = 0.0;  // may be far below 0; never clamped
  bool vacuous = false;     // confidence <= 0 carries no information
  double b_constant = 0.0;
  double covering_radius = 0.0;
  double log_covering_count = 0.0;
  double log_failure_term = 0.0;  // log(1 - confidence), always finite
  std::optional<double> eps_prime;
  nlohmann::json echo;  // input echo for auditability

  nlohmann::json to_json() const;
};

// log of the volumetric covering bound (1 + 2M/r)^d for the radius-M ball;
// a single ball suffices once r > M.
double covering_number_ball_log(double weight_radius, double covering_radius, double dim);

// Uniform-margin estimate |E_{delta ~ U[-M, M]} d/d delta loss(sigma(delta))|
// for the margin losses (logistic, hinge). Composite trapezoid quadrature
// with the domain split at the transform crossover +-c and at the hinge
// kink, so no panel crosses a non-smooth point; panel endpoints are
// evaluated as one-sided limits.
double lipschitz_small_uniform(const LossSpec& spec, double margin_range,
                               long quad_points = 200001);

// Smallest eps' on a geometric grid (factor 1.05 spanning [1e-8 eps, eps])
// with eps' >= min(eps, eps / (4 L_R(eps'))); eps' = eps always satisfies
// the condition and is the fallback.
double eps_prime_fixed_point(const std::function<double(double)>& lipschitz_in_small,
                             double epsilon);

// Confidence that sup_w |R(w) - Rhat(w)| <= eps + L_l eps^2 / (2B) with
// B = L_R(M) M + C_l; the covering radius is eps / (4 L_R(eps')).
BoundReport confidence_small_lipschitz(const BoundQuery& q);

// Classical calculator: B = L_l M + C_l, covering radius eps / (4 L_l),
// and plain deviation level eps.
BoundReport confidence_global_lipschitz(const BoundQuery& q);

struct LipschitzEstimate {
  double estimate = 0.0;  // max observed ratio; a lower bound on the sup
  int pairs = 0;
};

// Estimates L_R(eps) as the max of |R(w1) - R(w2)| / ||w1 - w2|| over
// sampled pairs at distance <= eps inside the radius-M ball. Pair i is
// drawn from substream (seed, i), so enlarging n_pairs keeps a nested
// sample and the estimate can only grow.
LipschitzEstimate lipschitz_small_mc(const std::function<double(const Eigen::VectorXd&)>& risk,
                                     double epsilon, double weight_radius, int dim, int n_pairs,
                                     std::uint64_t seed);

// Mixture of two unit Gaussians at +-(separation/2) e1 with labels +-1;
// optionally rescaled into the unit ball so feature norms stay <= 1.
struct TwoGaussianSpec {
  int dim = 2;
  double separation = 4.0;
  bool clip_to_unit_ball = true;

  nlohmann::json to_json() const;
};

struct Lemma2Spec {
  LossSpec loss;                // binary margin loss
  double loss_lipschitz = 1.0;  // L_l of the transformed loss
  TwoGaussianSpec dist;
  Eigen::VectorXd w1;
  Eigen::VectorXd w2;
  double epsilon = 0.1;  // declared bound on ||w1 - w2||
  double rho = 0.05;
  int sample_count = 200;  // N per trial
  int trials = 2000;
  std::uint64_t seed = 0;
  long ref_samples = 10000000;

  void validate() const;
};

struct Lemma2Report {
  double frequency = 0.0;  // fraction of trials with deviation >= rho
  double bound = 0.0;      // 2 exp(-N rho^2 / (2 L_l^2 eps^2))
  double slack = 0.0;      // 4 sqrt(0.25 / trials), binomial allowance
  bool pass = false;       // frequency <= bound + slack
  int violations = 0;
  double ref_gap = 0.0;    // reference R(w1) - R(w2)
  double ref_standard_error = 0.0;
  nlohmann::json to_json() const;
};

// Empirical check of the concentration step: the frequency of
// |(R(w1) - R(w2)) - (Rhat(w1) - Rhat(w2))| >= rho over seeded trial
// datasets must stay below the Hoeffding bound plus binomial slack. The
// reference risks use a dedicated large Monte Carlo sample.
Lemma2Report lemma2_mc_check(const Lemma2Spec& spec);

}  // namespace exploss
