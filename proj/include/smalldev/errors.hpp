#pragma once

#include <stdexcept>
#include <string>

namespace smalldev {

/// Requested operation is not available for the given inputs (e.g. a CDF with
/// no implemented closed form, or a predictor for an unclassified tail).
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine could not certify the requested tolerance.
/// `achieved` carries the error bound that was actually reached.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Monte Carlo guard: the target event is too rare for the sample budget.
class RareEventError : public std::runtime_error {
 public:
  explicit RareEventError(const std::string& what) : std::runtime_error(what) {}
};

/// Order-fit failure (degenerate or insufficient data).
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace smalldev
