#include "smalldev/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "smalldev/errors.hpp"

namespace smalldev {

std::string target_name(Target t) { return t == Target::Sum ? "sum" : "sup"; }

AsymptoticPrediction AsymptoticPrediction::log_order(Target t, double c) {
  return {t, Shape::LogOrder, c, 0.0};
}
AsymptoticPrediction AsymptoticPrediction::log_squared(Target t, double c) {
  return {t, Shape::LogSquared, c, 0.0};
}
AsymptoticPrediction AsymptoticPrediction::log_cubed(Target t, double c) {
  return {t, Shape::LogCubed, c, 0.0};
}
AsymptoticPrediction AsymptoticPrediction::power(Target t, double c,
                                                 double gamma) {
  return {t, Shape::Power, c, gamma};
}

double AsymptoticPrediction::evaluate(double eps) const {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("prediction: eps must be in (0, 1)");
  double l = std::log(1.0 / eps);
  switch (shape_) {
    case Shape::LogOrder:
      return constant_ * l;
    case Shape::LogSquared:
      return constant_ * l * l;
    case Shape::LogCubed:
      return constant_ * l * l * l;
    case Shape::Power:
      return constant_ * std::pow(eps, -exponent_);
  }
  return 0.0;  // unreachable
}

std::string AsymptoticPrediction::formula() const {
  switch (shape_) {
    case Shape::LogOrder:
      return "c*log(1/eps)";
    case Shape::LogSquared:
      return "c*log(1/eps)^2";
    case Shape::LogCubed:
      return "c*log(1/eps)^3";
    case Shape::Power:
      return "c*eps^-gamma";
  }
  return {};
}

namespace {

double check_q(double q) {
  if (!(std::isfinite(q) && q > 0.0 && q < 1.0))
    throw std::domain_error("predict: q must be in (0, 1)");
  return std::log(1.0 / q);
}

}  // namespace

AsymptoticPrediction predict_sum(const TailClass& tail, double q) {
  double logq_inv = check_q(q);
  return std::visit(
      [&](const auto& t) -> AsymptoticPrediction {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, AtomAtZero>) {
          return AsymptoticPrediction::log_order(
              Target::Sum, std::log(1.0 / t.p0) / logq_inv);
        } else if constexpr (std::is_same_v<T, PolynomialTail>) {
          return AsymptoticPrediction::log_squared(
              Target::Sum, t.beta / (2.0 * logq_inv));
        } else if constexpr (std::is_same_v<T, ExponentialSmallTail>) {
          double gp = t.gamma / (1.0 + t.gamma);
          double c =
              t.K / std::pow(1.0 - std::pow(q, gp), 1.0 + t.gamma);
          return AsymptoticPrediction::power(Target::Sum, c, t.gamma);
        } else {
          throw CapabilityError("predict_sum: tail class is unclassified");
        }
      },
      tail);
}

AsymptoticPrediction predict_sup(const TailClass& tail, double q) {
  double logq_inv = check_q(q);
  return std::visit(
      [&](const auto& t) -> AsymptoticPrediction {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, AtomAtZero>) {
          return AsymptoticPrediction::log_order(
              Target::Sup, std::log(1.0 / t.p0) / logq_inv);
        } else if constexpr (std::is_same_v<T, PolynomialTail>) {
          return AsymptoticPrediction::log_squared(
              Target::Sup, t.beta / (2.0 * logq_inv));
        } else if constexpr (std::is_same_v<T, ExponentialSmallTail>) {
          double c = t.K / (1.0 - std::pow(q, t.gamma));
          return AsymptoticPrediction::power(Target::Sup, c, t.gamma);
        } else {
          throw CapabilityError("predict_sup: tail class is unclassified");
        }
      },
      tail);
}

AsymptoticPrediction predict_sum_lognormal(double q) {
  double logq_inv = check_q(q);
  return AsymptoticPrediction::log_cubed(Target::Sum, 1.0 / (6.0 * logq_inv));
}

std::pair<double, double> exp_tail_transform(const LaplaceScaleParams& p) {
  if (!(p.gamma_prime > 0.0 && p.gamma_prime < 1.0))
    throw std::domain_error("exp_tail_transform: gamma' must be in (0, 1)");
  if (!(p.k_prime > 0.0))
    throw std::domain_error("exp_tail_transform: K' must be > 0");
  double gp = p.gamma_prime;
  double gamma = gp / (1.0 - gp);
  double K = std::pow(p.k_prime * std::pow(gp, gp) *
                          std::pow(1.0 - gp, 1.0 - gp),
                      1.0 / (1.0 - gp));
  return {K, gamma};
}

LaplaceScaleParams exp_tail_inverse(double K, double gamma) {
  if (!(K > 0.0)) throw std::domain_error("exp_tail_inverse: K must be > 0");
  if (!(gamma > 0.0))
    throw std::domain_error("exp_tail_inverse: gamma must be > 0");
  double gp = gamma / (1.0 + gamma);
  double k_prime = std::pow(K, 1.0 - gp) /
                   (std::pow(gp, gp) * std::pow(1.0 - gp, 1.0 - gp));
  return {k_prime, gp};
}

namespace {

std::pair<double, double> tauberian_identity(double K, double gamma,
                                             const char* who) {
  if (!(K > 0.0)) throw std::domain_error(std::string(who) + ": K must be > 0");
  if (!(gamma >= 1.0))
    throw std::domain_error(std::string(who) +
                            ": exponent must be >= 1 for the log-scale "
                            "equivalence to hold");
  return {K, gamma};
}

}  // namespace

std::pair<double, double> tauberian_tail_from_laplace(double K, double gamma) {
  return tauberian_identity(K, gamma, "tauberian_tail_from_laplace");
}

std::pair<double, double> tauberian_laplace_from_tail(double K, double gamma) {
  return tauberian_identity(K, gamma, "tauberian_laplace_from_tail");
}

AsymptoticPrediction predict_for(const DistributionSpec& dist, double q,
                                 Target target) {
  TailClass tail = classify_tail(dist);
  if (std::holds_alternative<UnclassifiedTail>(tail)) {
    if (std::holds_alternative<LogNormal>(dist.law()) && target == Target::Sum)
      return predict_sum_lognormal(q);
    throw CapabilityError("no predictor for " + dist.kind() + " with target " +
                          target_name(target));
  }
  return target == Target::Sum ? predict_sum(tail, q) : predict_sup(tail, q);
}

nlohmann::json to_json(const AsymptoticPrediction& p) {
  const char* shape = nullptr;
  switch (p.shape()) {
    case AsymptoticPrediction::Shape::LogOrder:
      shape = "log_order";
      break;
    case AsymptoticPrediction::Shape::LogSquared:
      shape = "log_squared";
      break;
    case AsymptoticPrediction::Shape::LogCubed:
      shape = "log_cubed";
      break;
    case AsymptoticPrediction::Shape::Power:
      shape = "power";
      break;
  }
  nlohmann::json j{{"target", target_name(p.target())},
                   {"shape", shape},
                   {"constant", p.constant()},
                   {"formula", p.formula()}};
  if (p.shape() == AsymptoticPrediction::Shape::Power)
    j["exponent"] = p.exponent();
  return j;
}

}  // namespace smalldev
