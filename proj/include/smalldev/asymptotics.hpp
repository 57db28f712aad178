#pragma once

#include <string>
#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "smalldev/distributions.hpp"

namespace smalldev {

enum class Target { Sum, Sup };

std::string target_name(Target t);

/// Leading-order rate for -log P(T <= eps) as eps -> 0, where T is either
/// the weighted series (Sum) or its sup term (Sup). Carries its shape
/// symbolically so reports can print the formula next to measurements.
class AsymptoticPrediction {
 public:
  enum class Shape { LogOrder, LogSquared, LogCubed, Power };

  static AsymptoticPrediction log_order(Target t, double c);
  static AsymptoticPrediction log_squared(Target t, double c);
  static AsymptoticPrediction log_cubed(Target t, double c);
  static AsymptoticPrediction power(Target t, double c, double gamma);

  /// Predicted -log P at eps, per shape:
  ///   LogOrder   c * log(1/eps)
  ///   LogSquared c * log(1/eps)^2
  ///   LogCubed   c * log(1/eps)^3
  ///   Power      c * eps^-gamma
  double evaluate(double eps) const;

  Target target() const { return target_; }
  Shape shape() const { return shape_; }
  double constant() const { return constant_; }
  double exponent() const { return exponent_; }  // Power only
  std::string formula() const;

 private:
  AsymptoticPrediction(Target t, Shape s, double c, double g)
      : target_(t), shape_(s), constant_(c), exponent_(g) {}
  Target target_;
  Shape shape_;
  double constant_;
  double exponent_;
};

/// Coefficients of a log-Laplace exponent growing like K' lambda^gamma',
/// gamma' in (0, 1).
struct LaplaceScaleParams {
  double k_prime;
  double gamma_prime;
};

/// Rate of -log P(sum <= eps) for weight ratio q, by tail class:
///   AtomAtZero(p0)            -> LogOrder  log(1/p0) / log(1/q)
///   Polynomial(beta)          -> LogSquared beta / (2 log(1/q))
///   ExponentialSmall(K,gamma) -> Power K / (1 - q^(gamma/(1+gamma)))^(1+gamma)
/// Unclassified -> CapabilityError.
AsymptoticPrediction predict_sum(const TailClass& tail, double q);

/// Rate of -log P(sup <= eps): same as predict_sum for atom and polynomial
/// tails; ExponentialSmall(K,gamma) -> Power K / (1 - q^gamma), gamma.
AsymptoticPrediction predict_sup(const TailClass& tail, double q);

/// Log-normal steps escape the classified families; their sum rate is
/// LogCubed 1 / (6 log(1/q)).
AsymptoticPrediction predict_sum_lognormal(double q);

/// Laplace-scale growth K' lambda^gamma' maps to the lower-tail law
/// -log P(X <= eps) ~ K eps^-gamma:
///   gamma = gamma'/(1-gamma'),
///   K     = (K' gamma'^gamma' (1-gamma')^(1-gamma'))^(1/(1-gamma')).
std::pair<double, double> exp_tail_transform(const LaplaceScaleParams& p);

/// Inverse of exp_tail_transform; round trip is identity to 1e-12.
LaplaceScaleParams exp_tail_inverse(double K, double gamma);

/// -log E exp(-lambda S) ~ K (log lambda)^gamma as lambda -> inf is
/// equivalent to -log P(S <= eps) ~ K (log 1/eps)^gamma, verbatim, for
/// gamma >= 1. Both directions reject gamma < 1 (std::domain_error).
std::pair<double, double> tauberian_tail_from_laplace(double K, double gamma);
std::pair<double, double> tauberian_laplace_from_tail(double K, double gamma);

/// Predictor dispatch used by tables and the CLI: classify, then predict;
/// log-normal steps fall back to predict_sum_lognormal for Target::Sum.
AsymptoticPrediction predict_for(const DistributionSpec& dist, double q,
                                 Target target);

nlohmann::json to_json(const AsymptoticPrediction& p);

}  // namespace smalldev
