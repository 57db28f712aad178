#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace smalldev::num {

struct Quad {
  double value;
  double abs_error;  // estimate reported by the integrator
};

/// Adaptive Gauss-Kronrod integration of f over [a, b].
/// `rel_tol` is the relative termination target; `max_depth` caps the number
/// of evaluations. Throws NumericalError if the estimate cannot be certified
/// to within max(rel_tol * |value|, abs_floor).
Quad integrate(const std::function<double(double)>& f, double a, double b,
               double rel_tol = 1e-14, int max_depth = 14,
               double abs_floor = 1e-300);

/// log(erfc(z)), stable for large z where erfc underflows.
double log_erfc(double z);

/// log(Phi(z)) for a standard normal, stable deep in the lower tail.
double log_std_normal_cdf(double z);

struct GoldenResult {
  double x;       // argmax
  double fx;      // value at argmax
  long evals;
};

/// Golden-section maximization of a unimodal f on [a, b].
/// Stops when the bracket width falls below tol (absolute, in x).
GoldenResult golden_max(const std::function<double(double)>& f, double a,
                        double b, double tol, long max_iter = 400);

/// Compensated accumulator (Neumaier variant: survives cancellation where
/// the running sum swings through zero); keeps long series sums near machine
/// precision independent of term count.
class KahanSum {
 public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// SplitMix64 step; used to derive independent per-chunk RNG seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Upper bound on the remaining tail of a series with nonincreasing
/// successive-term ratios, given the last computed term and its predecessor.
/// Returns +inf while the observed ratio is >= 1.
double geometric_tail_bound(double last_term, double prev_term);

}  // namespace smalldev::num
