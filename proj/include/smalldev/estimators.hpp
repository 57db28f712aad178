#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "smalldev/asymptotics.hpp"
#include "smalldev/series.hpp"

namespace smalldev {

enum class EstimatorMethod { ExactProduct, Chernoff, MonteCarlo };

std::string method_name(EstimatorMethod m);

struct McInfo {
  std::uint64_t n_samples;
  std::uint64_t seed;
  std::uint64_t hits;
};

struct TailEstimate {
  enum class ErrorKind {
    CertifiedAbsolute,    // |reported - exact| <= error
    CertifiedLowerBound,  // reported is a lower bound, accurate to error
    ConfidenceInterval99  // error = 99% CI half-width in -log space
  };

  Target target;
  double epsilon;
  double neg_log_p;  // estimate of -log P(target <= epsilon)
  EstimatorMethod method;
  ErrorKind error_kind;
  double error;
  long truncation = 0;  // series/product terms used
  bool infinite = false;    // the event has probability zero
  bool degenerate = false;  // Chernoff could not bracket; bound is trivial
  std::optional<double> chernoff_lambda;  // optimizer location
  std::optional<McInfo> mc;
};

/// -log P(sup_n q^n X_n <= eps) = sum_n -log P(X <= eps q^-n), summed
/// directly until the factors are near 1, then closed with the bound
/// -log(1-x) <= x/(1-x) on the remainder. Certified absolute error.
TailEstimate sup_exact_product(const SeriesSpec& series, double eps,
                               double tol = 1e-9);

/// Certified lower bound sup_lambda { F(lambda) - lambda eps } on
/// -log P(sum <= eps), maximized by golden section in log lambda after a
/// doubling bracket. Returns 0 with `degenerate` set when no ascent exists
/// (eps at or above the mean of the series).
TailEstimate sum_chernoff(const SeriesSpec& series, double eps);

/// Hit-counting Monte Carlo for P(sum <= eps) with truncation depth chosen
/// so the discarded tail shifts the event by at most trunc_tol * eps
/// (mean-based when the step mean exists, otherwise a Markov bound through
/// the Laplace transform). Wilson 99% CI; identical results for any worker
/// count at fixed seed. Throws RareEventError below ~10 expected hits.
TailEstimate sum_monte_carlo(const SeriesSpec& series, double eps,
                             std::uint64_t n_samples, std::uint64_t seed,
                             double trunc_tol = 1e-3, int workers = 1);

/// Same engine for P(sup <= eps). Truncation is exact for bounded steps;
/// unbounded steps use the union bound on P(q^n X > eps).
TailEstimate sup_monte_carlo(const SeriesSpec& series, double eps,
                             std::uint64_t n_samples, std::uint64_t seed,
                             int workers = 1);

nlohmann::json to_json(const TailEstimate& est);

}  // namespace smalldev
