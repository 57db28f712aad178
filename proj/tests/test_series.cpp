#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "smalldev/distributions.hpp"
#include "smalldev/errors.hpp"
#include "smalldev/series.hpp"

using namespace smalldev;

namespace {

std::vector<DistributionSpec> catalog() {
  return {DistributionSpec::bernoulli_at_zero(0.5, 1.0),
          DistributionSpec::bernoulli_at_zero(0.2, 3.0),
          DistributionSpec::exponential(1.0),
          DistributionSpec::gamma(2.5, 1.5),
          DistributionSpec::power_of_half_normal(2.0),
          DistributionSpec::power_of_half_normal(0.7),
          DistributionSpec::stable_totally_skewed(0.5, 1.0),
          DistributionSpec::stable_totally_skewed(0.3, 0.6),
          DistributionSpec::inverse_weibull(2.0, 1.0),
          DistributionSpec::log_normal(0.0, 1.0)};
}

}  // namespace

TEST_CASE("f_exact: exponential steps against a direct partial sum") {
  // Exp(1), q = 1/2: F(1) = sum_n log(1 + 2^-n); 64 terms put the true
  // remainder below 1e-18, so a plain loop is an independent oracle.
  SeriesSpec sp(DistributionSpec::exponential(1.0), 0.5);
  double direct = 0.0;
  for (int n = 63; n >= 0; --n) direct += std::log1p(std::pow(0.5, n));
  CHECK(direct == doctest::Approx(1.5620238332185).epsilon(1e-12));

  EvalResult r = f_exact(sp, 1.0, 1e-11);
  CHECK(std::abs(r.value - direct) < 2e-13);
  CHECK(r.error_bound < 1e-11);
  CHECK(r.terms > 20);

  CHECK(sp.f1() == doctest::Approx(direct).epsilon(1e-11));
  CHECK(std::abs(sp.f1() - direct) <= sp.f1_error() + 1e-13);
}

TEST_CASE("f_exact: halving lambda drops exactly the leading term") {
  // F(lambda) - F(q lambda) = G(lambda), evaluated away from the tolerance
  SeriesSpec sp(DistributionSpec::gamma(2.0, 1.0), 0.5);
  for (double lam : {1.0, 3.0, 17.0, 450.0}) {
    double f_hi = f_exact(sp, lam, 1e-12).value;
    double f_lo = f_exact(sp, 0.5 * lam, 1e-12).value;
    double g = log_laplace(sp.dist(), lam);
    CHECK(std::abs(f_hi - f_lo - g) < 1e-11 * std::max(1.0, f_hi));
  }
}

TEST_CASE("f_exact: stable steps have the closed form K lambda^a/(1-q^a)") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    for (double q : {0.3, 0.5, 0.9}) {
      SeriesSpec sp(DistributionSpec::stable_totally_skewed(alpha, 1.3), q);
      for (double lam : {0.5, 2.0, 1e4}) {
        double expect = 1.3 * std::pow(lam, alpha) /
                        (1.0 - std::pow(q, alpha));
        double tol = 1e-11 * (1.0 + expect);
        CHECK(f_exact(sp, lam, tol).value ==
              doctest::Approx(expect).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("f_exact: edge cases and the tolerance contract") {
  SeriesSpec sp(DistributionSpec::exponential(2.0), 0.7);
  CHECK(f_exact(sp, 0.0, 1e-10).value == 0.0);
  CHECK_THROWS_AS(f_exact(sp, -1.0, 1e-10), std::domain_error);
  CHECK_THROWS_AS(f_exact(sp, 1.0, 0.0), std::domain_error);

  // tightening tol by 10x moves the value by less than the certified bound
  EvalResult loose = f_exact(sp, 7.0, 1e-8);
  EvalResult tight = f_exact(sp, 7.0, 1e-9);
  CHECK(std::abs(loose.value - tight.value) <=
        loose.error_bound + tight.error_bound);

  // monotone in lambda
  double prev = 0.0;
  for (double lam : {0.1, 1.0, 10.0, 100.0, 1e4}) {
    double v = f_exact(sp, lam, 1e-10).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("f_bracket: exponential q=1/2 at lambda=2 in closed form") {
  // M = floor(log 2/log 2) = 1: lo = G(2) + G(1) = log 3 + log 2 = log 6
  SeriesSpec sp(DistributionSpec::exponential(1.0), 0.5);
  LogLaplaceBracket br = f_bracket(sp, 2.0);
  CHECK(br.lo == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(br.terms_used == 2);
  CHECK(br.hi == doctest::Approx(std::log(6.0) + sp.f1() + sp.f1_error())
                     .epsilon(1e-14));
  double f = f_exact(sp, 2.0, 1e-11).value;
  CHECK(br.lo <= f);
  CHECK(f <= br.hi);

  CHECK_THROWS_AS(f_bracket(sp, 1.0), std::domain_error);
  CHECK_THROWS_AS(f_bracket(sp, 0.3), std::domain_error);
}

TEST_CASE("f_bracket contains f_exact across the catalog") {
  for (const auto& d : catalog()) {
    for (double q : {0.3, 0.5, 0.9}) {
      SeriesSpec sp(d, q);
      for (double lam = 1.01; lam < 2e6; lam *= 11.7) {
        LogLaplaceBracket br = f_bracket(sp, lam);
        double scale = std::max(1.0, br.hi);
        EvalResult fe = f_exact(sp, lam, 1e-10 * scale);
        CHECK(br.lo <= fe.value + fe.error_bound + 1e-12 * scale);
        CHECK(fe.value <= br.hi + fe.error_bound + 1e-12 * scale);
        CHECK(br.hi - br.lo <=
              sp.f1() + sp.f1_error() + 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("functional equation F(q lambda) + G(lambda) = F(lambda)") {
  for (const auto& d : catalog()) {
    for (double q : {0.3, 0.5, 0.9}) {
      SeriesSpec sp(d, q);
      for (double lam : {0.7, 1.5, 20.0, 1e3}) {
        double scale = std::max(1.0, f_exact(sp, lam, 1e-6).value);
        double tol = 1e-10 * scale;
        CHECK(check_functional_equation(sp, lam, tol) <= 3.0 * tol);
      }
    }
  }
}

TEST_CASE("functional equation breaks under a q perturbation") {
  SeriesSpec sp(DistributionSpec::exponential(1.0), 0.5);
  double clean = check_functional_equation(sp, 10.0, 1e-10);
  double shifted = check_functional_equation(sp, 10.0, 1e-10, 0.01);
  CHECK(clean <= 3e-10);
  CHECK(shifted > 1e-3);  // negative control: must be far above the band
  CHECK_THROWS_AS(check_functional_equation(sp, 10.0, 1e-10, 0.5),
                  std::domain_error);
}

TEST_CASE("series construction validates q") {
  auto d = DistributionSpec::exponential(1.0);
  CHECK_THROWS_AS(SeriesSpec(d, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SeriesSpec(d, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SeriesSpec(d, -0.2), std::invalid_argument);
  CHECK_THROWS_AS(SeriesSpec(d, 1.7), std::invalid_argument);
}

TEST_CASE("series handles q close to 1 by relaxing the cache tolerance") {
  SeriesSpec sp(DistributionSpec::stable_totally_skewed(0.3, 1.0), 0.99);
  // F(1) = 1/(1 - 0.99^0.3) exactly
  double expect = 1.0 / (1.0 - std::pow(0.99, 0.3));
  CHECK(sp.f1() == doctest::Approx(expect).epsilon(1e-8));
  CHECK(sp.f1_error() < 1e-4 * expect);
}
