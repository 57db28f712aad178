#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "smalldev/errors.hpp"
#include "smalldev/numerics.hpp"

using namespace smalldev;

TEST_CASE("integrate: polynomials and oscillations to near machine") {
  auto sq = num::integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(sq.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  auto sine = num::integrate([](double x) { return std::sin(x); }, 0.0,
                             3.141592653589793);
  CHECK(sine.value == doctest::Approx(2.0).epsilon(1e-13));
  auto gauss = num::integrate(
      [](double x) { return std::exp(-0.5 * x * x); }, -10.0, 10.0);
  CHECK(gauss.value == doctest::Approx(2.5066282746310002).epsilon(1e-13));
}

TEST_CASE("log_erfc matches high-precision references on both branches") {
  // below the asymptotic switch: plain log(erfc)
  CHECK(num::log_erfc(0.5) ==
        doctest::Approx(-0.73501112983708440303).epsilon(1e-13));
  CHECK(num::log_erfc(3.0) ==
        doctest::Approx(-10.720363041981112568).epsilon(1e-13));
  CHECK(num::log_erfc(19.5) ==
        doctest::Approx(-383.7940900381005038).epsilon(1e-13));
  // above the switch: asymptotic series, graded tolerance
  CHECK(num::log_erfc(20.5) ==
        doctest::Approx(-423.84397607879115818).epsilon(1e-12));
  CHECK(num::log_erfc(25.0) ==
        doctest::Approx(-628.79203917407168537).epsilon(1e-12));
  CHECK(num::log_erfc(30.0) ==
        doctest::Approx(-903.97411711064387808).epsilon(1e-13));
  CHECK(num::log_erfc(158.0) ==
        doctest::Approx(-24969.634980003790412).epsilon(1e-13));
}

TEST_CASE("log_erfc is continuous across the branch switch") {
  double below = num::log_erfc(std::nextafter(20.0, 0.0));
  double above = num::log_erfc(20.0);
  CHECK(std::abs(below - above) < 1e-9 * std::abs(above));
}

TEST_CASE("log_std_normal_cdf deep tail and body") {
  CHECK(num::log_std_normal_cdf(-40.0) ==
        doctest::Approx(-804.60844201375378817).epsilon(1e-13));
  CHECK(num::log_std_normal_cdf(-8.0) ==
        doctest::Approx(-35.013437159914549896).epsilon(1e-13));
  CHECK(num::log_std_normal_cdf(1.25) ==
        doctest::Approx(-0.11165782847292517066).epsilon(1e-12));
  CHECK(num::log_std_normal_cdf(0.0) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("golden_max finds the peak of a smooth unimodal function") {
  auto r = num::golden_max([](double x) { return -(x - 1.3) * (x - 1.3); },
                           -4.0, 7.0, 1e-10);
  CHECK(std::abs(r.x - 1.3) < 1e-9);
  CHECK(r.fx == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.evals < 120);

  // localization is limited by sqrt(ulp) once f differences hit roundoff;
  // the value itself stays accurate to ~1e-12 relative
  auto skew = num::golden_max(
      [](double x) { return std::log(x) - 0.37 * x; }, 0.1, 50.0, 1e-10);
  CHECK(std::abs(skew.x - 1.0 / 0.37) < 1e-6);
  double peak = std::log(1.0 / 0.37) - 1.0;
  CHECK(skew.fx == doctest::Approx(peak).epsilon(1e-12));
}

TEST_CASE("KahanSum keeps cancellation-prone sums exact") {
  num::KahanSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-15));

  num::KahanSum t;
  for (int i = 0; i < 1000000; ++i) t.add(0.1);
  CHECK(std::abs(t.value() - 100000.0) < 1e-8);
}

TEST_CASE("splitmix64 reference vectors") {
  CHECK(num::splitmix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(num::splitmix64(1) == 0x910A2DEC89025CC1ull);
  CHECK(num::splitmix64(0xDEADBEEFull) == 0x4ADFB90F68C9EB9Bull);
}

TEST_CASE("geometric_tail_bound") {
  // ratio 1/2: bound = last * r/(1-r) = last
  CHECK(num::geometric_tail_bound(1.0, 2.0) == doctest::Approx(1.0));
  // exact geometric series: remainder after term r^k is r^{k+1}/(1-r)
  double r = 0.3;
  CHECK(num::geometric_tail_bound(r * r, r) ==
        doctest::Approx(r * r * r / (1.0 - r)).epsilon(1e-15));
  CHECK(num::geometric_tail_bound(0.0, 1.0) == 0.0);
  CHECK(std::isinf(num::geometric_tail_bound(1.0, 1.0)));
  CHECK(std::isinf(num::geometric_tail_bound(2.0, 1.0)));
}
