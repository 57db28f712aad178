#include "smalldev/series.hpp"

#include <cmath>
#include <stdexcept>

#include "smalldev/errors.hpp"
#include "smalldev/numerics.hpp"

namespace smalldev {

namespace {

// Summation core, shared with the SeriesSpec constructor (which has no
// SeriesSpec to pass yet). Successive-term ratios G(q^(n+1) lambda) /
// G(q^n lambda) are nonincreasing for every catalog law, so the geometric
// extrapolation of the remainder is a valid upper bound.
EvalResult sum_terms(const DistributionSpec& dist, double q, double lambda,
                     double tol) {
  if (!(lambda >= 0.0)) throw std::domain_error("f_exact: lambda must be >= 0");
  if (!(tol > 0.0)) throw std::domain_error("f_exact: tol must be > 0");
  if (lambda == 0.0) return {0.0, 0.0, 0};

  num::KahanSum sum;
  double prev_term = -1.0;
  const double term_floor = 0.5 * tol * (1.0 - q);
  const long cap = 200000;
  for (long n = 0; n < cap; ++n) {
    double term = log_laplace(dist, lambda * std::pow(q, double(n)));
    sum.add(term);
    double tail = num::geometric_tail_bound(term, prev_term);
    double eval_slack = (double(n + 1) * 2.3e-16 + 1e-14) * sum.value();
    if (term < term_floor) {
      if (tail + eval_slack <= 0.5 * tol)
        return {sum.value(), tail + eval_slack, n + 1};
      // the roundoff floor only grows with n; give up now, not at the cap
      if (eval_slack > 0.5 * tol)
        throw NumericalError("f_exact: roundoff floor exceeds the tolerance",
                             tail + eval_slack);
    }
    prev_term = term;
  }
  throw NumericalError("f_exact: series did not settle within the term cap",
                       sum.value());
}

}  // namespace

SeriesSpec::SeriesSpec(DistributionSpec dist, double q)
    : dist_(std::move(dist)), q_(q) {
  if (!(std::isfinite(q) && q > 0.0 && q < 1.0))
    throw std::invalid_argument("series: q must be in (0, 1)");
  if (!check_wellposed(dist_))
    throw std::invalid_argument("series: steps violate the log-moment condition");
  // F(1) grows like 1/(1-q); relax the cache tolerance until the roundoff
  // floor admits it (q near 1 cannot certify 1e-10 absolute).
  double tol = 1e-10;
  for (;;) {
    try {
      EvalResult r = sum_terms(dist_, q_, 1.0, tol);
      f1_value_ = r.value;
      f1_error_ = r.error_bound;
      return;
    } catch (const NumericalError&) {
      tol *= 100.0;
      if (tol > 1e-2) throw;
    }
  }
}

EvalResult f_exact(const SeriesSpec& series, double lambda, double tol) {
  return sum_terms(series.dist(), series.q(), lambda, tol);
}

LogLaplaceBracket f_bracket(const SeriesSpec& series, double lambda) {
  if (!(lambda > 1.0)) throw std::domain_error("f_bracket: lambda must be > 1");
  double q = series.q();
  // Nudged floor: including one extra term keeps both sides of the bracket
  // valid (any partial sum stays below F, and q^(M+1) lambda <= 1 still holds).
  long m = static_cast<long>(
      std::floor(std::log(lambda) / std::log(1.0 / q) + 1e-12));
  num::KahanSum lo;
  for (long n = 0; n <= m; ++n)
    lo.add(log_laplace(series.dist(), lambda * std::pow(q, double(n))));
  double hi = lo.value() + series.f1() + series.f1_error();
  return {lo.value(), hi, lambda, m + 1};
}

double check_functional_equation(const SeriesSpec& series, double lambda,
                                 double tol, double q_shift) {
  double qc = series.q() + q_shift;
  if (!(qc > 0.0 && qc < 1.0))
    throw std::domain_error("functional equation: shifted q leaves (0, 1)");
  double g = log_laplace(series.dist(), lambda);
  double f_at = f_exact(series, lambda, tol).value;
  double f_down = f_exact(series, qc * lambda, tol).value;
  return std::abs(f_down + g - f_at);
}

}  // namespace smalldev
