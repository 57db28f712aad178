#pragma once

#include "smalldev/distributions.hpp"

namespace smalldev {

/// The weighted series S = sum_n q^n X_n with i.i.d. nonnegative steps.
/// Well-posedness of the steps is enforced at construction. F(1) is computed
/// once and cached; instances are immutable and safe to share across threads.
class SeriesSpec {
 public:
  SeriesSpec(DistributionSpec dist, double q);

  const DistributionSpec& dist() const { return dist_; }
  double q() const { return q_; }
  double f1() const { return f1_value_; }
  double f1_error() const { return f1_error_; }

 private:
  DistributionSpec dist_;
  double q_;
  double f1_value_;
  double f1_error_;
};

struct EvalResult {
  double value;
  double error_bound;  // certified (conservative) absolute bound
  long terms;          // series terms actually summed
};

/// Two-sided bracket for F(lambda) = -log E exp(-lambda S) at lambda > 1:
///   lo = sum_{n=0}^{M} G(q^n lambda), M = floor(log lambda / log(1/q)),
///   hi = lo + F(1).
struct LogLaplaceBracket {
  double lo;
  double hi;
  double lambda;
  long terms_used;  // M + 1
};

/// F(lambda) = sum_{n>=0} G(q^n lambda), truncated adaptively. Stops when
/// the last term falls under tol*(1-q)/2 and the extrapolated tail (see
/// geometric_tail_bound) plus roundoff is certified under tol/2.
EvalResult f_exact(const SeriesSpec& series, double lambda, double tol);

LogLaplaceBracket f_bracket(const SeriesSpec& series, double lambda);

/// Residual |F(q lambda) + G(lambda) - F(lambda)| with both F values
/// computed at tol; callers should compare against 3*tol. The optional
/// fault-injection shift perturbs q on the evaluation side only, so a
/// nonzero shift must break the identity (negative control for verify).
double check_functional_equation(const SeriesSpec& series, double lambda,
                                 double tol, double q_shift = 0.0);

}  // namespace smalldev
