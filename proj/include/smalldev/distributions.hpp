#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

namespace smalldev {

// Catalog of nonnegative step laws. Each entry knows its log-Laplace
// exponent G(lambda) = -log E exp(-lambda X) (closed form where one exists,
// adaptive quadrature otherwise), its CDF where implementable, a sampler,
// and its lower-tail classification.

struct BernoulliAtZero {
  double p0;    // P(X = 0), in (0, 1]
  double atom;  // location of the other atom, > 0
};

struct Exponential {
  double rate;  // > 0
};

struct Gamma {
  double shape;  // > 0
  double rate;   // > 0
};

/// X = |Z|^power for a standard normal Z.
struct PowerOfHalfNormal {
  double power;  // > 0
};

/// Positive stable law, E exp(-lambda X) = exp(-K lambda^alpha).
struct StableTotallySkewed {
  double alpha;  // in (0, 1)
  double K;      // > 0
};

/// P(X <= x) = exp(-(scale/x)^shape).
struct InverseWeibull {
  double shape;  // > 0
  double scale;  // > 0
};

struct LogNormal {
  double mu;
  double sigma;  // > 0
};

class DistributionSpec {
 public:
  using Law = std::variant<BernoulliAtZero, Exponential, Gamma,
                           PowerOfHalfNormal, StableTotallySkewed,
                           InverseWeibull, LogNormal>;

  explicit DistributionSpec(Law law);  // validates parameter ranges

  const Law& law() const { return law_; }
  std::string kind() const;  // JSON/mini-syntax name

  static DistributionSpec bernoulli_at_zero(double p0, double atom);
  static DistributionSpec exponential(double rate);
  static DistributionSpec gamma(double shape, double rate);
  static DistributionSpec power_of_half_normal(double power);
  static DistributionSpec stable_totally_skewed(double alpha, double K);
  static DistributionSpec inverse_weibull(double shape, double scale);
  static DistributionSpec log_normal(double mu, double sigma);

 private:
  Law law_;
};

// Lower-tail classes near zero.
struct AtomAtZero {
  double p0;  // P(X = 0), in (0, 1]
};
struct PolynomialTail {
  double beta;  // P(X <= eps) ~ eps^beta, beta > 0
};
struct ExponentialSmallTail {
  double K;      // -log P(X <= eps) ~ K eps^-gamma
  double gamma;  // > 0
};
struct UnclassifiedTail {};

using TailClass = std::variant<AtomAtZero, PolynomialTail,
                               ExponentialSmallTail, UnclassifiedTail>;

/// G(lambda) = -log E exp(-lambda X). Nondecreasing, concave, G(0) = 0.
/// Quadrature-backed laws are certified to absolute error
/// max(1e-12, ~1e-15 G), the second term being the roundoff floor of the
/// exponent normalization at large lambda.
double log_laplace(const DistributionSpec& spec, double lambda);

/// P(X <= eps) for eps >= 0. CapabilityError where no implementable form
/// exists (stable with alpha != 1/2).
double cdf(const DistributionSpec& spec, double eps);

/// log P(X <= eps), stable where cdf underflows; -inf iff the probability
/// is structurally zero.
double log_cdf(const DistributionSpec& spec, double eps);

/// One draw. Deterministic given the engine state; no hidden state.
double sample(const DistributionSpec& spec, std::mt19937_64& rng);

TailClass classify_tail(const DistributionSpec& spec);

/// E log max(X, 1) < infinity. True for every catalog law; the probe for
/// user-supplied tails is log_moment_is_finite below.
bool check_wellposed(const DistributionSpec& spec);

/// Numeric divergence probe for integral of upper_tail(e^u) du, given
/// t -> P(X > t). Returns false when the integral is seen to diverge.
bool log_moment_is_finite(const std::function<double(double)>& upper_tail);

/// E X; nullopt when infinite.
std::optional<double> mean(const DistributionSpec& spec);

nlohmann::json to_json(const DistributionSpec& spec);
DistributionSpec dist_from_json(const nlohmann::json& j);

}  // namespace smalldev
