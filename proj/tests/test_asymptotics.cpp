#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "smalldev/asymptotics.hpp"
#include "smalldev/distributions.hpp"
#include "smalldev/errors.hpp"

using namespace smalldev;

TEST_CASE("atom steps: -log P(sum<=eps) ~ [log(1/p0)/log(1/q)] log(1/eps)") {
  AsymptoticPrediction p = predict_sum(AtomAtZero{0.5}, 0.5);
  CHECK(p.shape() == AsymptoticPrediction::Shape::LogOrder);
  CHECK(p.constant() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.evaluate(1e-3) == doctest::Approx(std::log(1e3)).epsilon(1e-14));

  // sup has the same rate for atoms
  AsymptoticPrediction s = predict_sup(AtomAtZero{0.5}, 0.5);
  CHECK(s.shape() == AsymptoticPrediction::Shape::LogOrder);
  CHECK(s.constant() == doctest::Approx(1.0).epsilon(1e-15));

  AsymptoticPrediction p2 = predict_sum(AtomAtZero{0.25}, 0.5);
  CHECK(p2.constant() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("polynomial steps: log-squared with constant beta/(2 log(1/q))") {
  AsymptoticPrediction p = predict_sum(PolynomialTail{1.0}, 0.5);
  CHECK(p.shape() == AsymptoticPrediction::Shape::LogSquared);
  CHECK(p.constant() ==
        doctest::Approx(0.7213475204444817).epsilon(1e-14));  // 1/(2 ln 2)
  double l = std::log(100.0);
  CHECK(p.evaluate(1e-2) ==
        doctest::Approx(0.7213475204444817 * l * l).epsilon(1e-13));

  AsymptoticPrediction s = predict_sup(PolynomialTail{2.5}, 0.3);
  CHECK(s.shape() == AsymptoticPrediction::Shape::LogSquared);
  CHECK(s.constant() ==
        doctest::Approx(2.5 / (2.0 * std::log(1.0 / 0.3))).epsilon(1e-14));
}

TEST_CASE("exponentially small steps: power laws for sum and sup") {
  // Levy steps (alpha = 1/2, K' = 1) have tail K = 1/4, gamma = 1
  ExponentialSmallTail t{0.25, 1.0};
  AsymptoticPrediction sum = predict_sum(t, 0.5);
  CHECK(sum.shape() == AsymptoticPrediction::Shape::Power);
  CHECK(sum.exponent() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sum.constant() ==
        doctest::Approx(2.9142135623730945).epsilon(1e-13));

  AsymptoticPrediction sup = predict_sup(t, 0.5);
  CHECK(sup.exponent() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sup.constant() == doctest::Approx(0.5).epsilon(1e-14));

  // the sup keeps only the largest factor, so its rate constant is smaller
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double q : {0.3, 0.5, 0.9}) {
      ExponentialSmallTail tc{1.7, gamma};
      CHECK(predict_sup(tc, q).constant() < predict_sum(tc, q).constant());
    }
  }

  // rates increase with q: more weight stays on later terms
  double prev_sum = 0.0, prev_sup = 0.0;
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    ExponentialSmallTail tc{1.0, 1.0};
    double cs = predict_sum(tc, q).constant();
    double cp = predict_sup(tc, q).constant();
    CHECK(cs > prev_sum);
    CHECK(cp > prev_sup);
    prev_sum = cs;
    prev_sup = cp;
  }
}

TEST_CASE("unclassified tails are rejected; lognormal sum has its own rate") {
  CHECK_THROWS_AS(predict_sum(UnclassifiedTail{}, 0.5), CapabilityError);
  CHECK_THROWS_AS(predict_sup(UnclassifiedTail{}, 0.5), CapabilityError);

  AsymptoticPrediction p = predict_sum_lognormal(0.5);
  CHECK(p.shape() == AsymptoticPrediction::Shape::LogCubed);
  CHECK(p.constant() ==
        doctest::Approx(1.0 / (6.0 * std::log(2.0))).epsilon(1e-14));

  auto logn = DistributionSpec::log_normal(0.0, 1.0);
  AsymptoticPrediction via = predict_for(logn, 0.5, Target::Sum);
  CHECK(via.shape() == AsymptoticPrediction::Shape::LogCubed);
  CHECK(via.constant() == doctest::Approx(p.constant()).epsilon(1e-15));
  CHECK_THROWS_AS(predict_for(logn, 0.5, Target::Sup), CapabilityError);
}

TEST_CASE("predict_for dispatches through classify_tail") {
  auto bern = DistributionSpec::bernoulli_at_zero(0.5, 1.0);
  CHECK(predict_for(bern, 0.5, Target::Sum).shape() ==
        AsymptoticPrediction::Shape::LogOrder);

  auto exp1 = DistributionSpec::exponential(1.0);
  CHECK(predict_for(exp1, 0.5, Target::Sum).constant() ==
        doctest::Approx(0.7213475204444817).epsilon(1e-14));

  auto levy = DistributionSpec::stable_totally_skewed(0.5, 1.0);
  AsymptoticPrediction sup = predict_for(levy, 0.5, Target::Sup);
  CHECK(sup.constant() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(sup.exponent() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("laplace-scale to tail-law transform and back") {
  // gamma' = 1/2, K' = 1 maps to the exact pair (K, gamma) = (1/4, 1)
  auto [K, gamma] = exp_tail_transform({1.0, 0.5});
  CHECK(K == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(gamma == doctest::Approx(1.0).epsilon(1e-14));

  LaplaceScaleParams back = exp_tail_inverse(0.25, 1.0);
  CHECK(back.k_prime == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(back.gamma_prime == doctest::Approx(0.5).epsilon(1e-13));

  for (double gp : {0.05, 0.2, 0.5, 0.8, 0.95}) {
    for (double kp : {0.3, 1.0, 4.2}) {
      auto [k2, g2] = exp_tail_transform({kp, gp});
      LaplaceScaleParams r = exp_tail_inverse(k2, g2);
      CHECK(r.k_prime == doctest::Approx(kp).epsilon(1e-12));
      CHECK(r.gamma_prime == doctest::Approx(gp).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(exp_tail_transform({1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(exp_tail_transform({1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(exp_tail_transform({0.0, 0.5}), std::domain_error);
}

TEST_CASE("chernoff closed form matches the predicted sum constant") {
  // sup_l (c l^a - l e) = c^(1/(1-a)) a^(a/(1-a)) (1-a) e^(-a/(1-a)) with
  // c = K'/(1 - q^a); the sum predictor must reproduce it exactly through
  // the tail transform, for every eps.
  for (double alpha : {0.3, 0.5, 0.7}) {
    for (double q : {0.3, 0.5, 0.9}) {
      double c = 1.0 / (1.0 - std::pow(q, alpha));
      double gamma = alpha / (1.0 - alpha);
      double chern = std::pow(c, 1.0 / (1.0 - alpha)) *
                     std::pow(alpha, alpha / (1.0 - alpha)) * (1.0 - alpha);
      auto tail = exp_tail_transform({1.0, alpha});
      AsymptoticPrediction p =
          predict_sum(ExponentialSmallTail{tail.first, tail.second}, q);
      CHECK(p.exponent() == doctest::Approx(gamma).epsilon(1e-13));
      CHECK(p.constant() == doctest::Approx(chern).epsilon(1e-12));
    }
  }
}

TEST_CASE("tauberian guard: verbatim above gamma=1, rejected below") {
  auto r = tauberian_tail_from_laplace(2.0, 1.5);
  CHECK(r.first == 2.0);
  CHECK(r.second == 1.5);
  auto r2 = tauberian_laplace_from_tail(1.0, 1.0);
  CHECK(r2.first == 1.0);
  CHECK(r2.second == 1.0);

  CHECK_THROWS_AS(tauberian_tail_from_laplace(1.0, 0.99), std::domain_error);
  CHECK_THROWS_AS(tauberian_laplace_from_tail(1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(tauberian_tail_from_laplace(0.0, 2.0), std::domain_error);
}

TEST_CASE("evaluate guards its domain") {
  AsymptoticPrediction p = predict_sum(PolynomialTail{1.0}, 0.5);
  CHECK_THROWS_AS(p.evaluate(0.0), std::domain_error);
  CHECK_THROWS_AS(p.evaluate(1.0), std::domain_error);
  CHECK_THROWS_AS(p.evaluate(-0.5), std::domain_error);
  CHECK_THROWS_AS(p.evaluate(2.0), std::domain_error);

  AsymptoticPrediction pw = predict_sum(ExponentialSmallTail{0.25, 1.0}, 0.5);
  CHECK(pw.evaluate(1e-3) ==
        doctest::Approx(2.9142135623730945e3).epsilon(1e-12));
}

TEST_CASE("formula strings name the shapes") {
  CHECK(predict_sum(AtomAtZero{0.5}, 0.5).formula() == "c*log(1/eps)");
  CHECK(predict_sum(PolynomialTail{1.0}, 0.5).formula() ==
        "c*log(1/eps)^2");
  CHECK(predict_sum_lognormal(0.5).formula() == "c*log(1/eps)^3");
  CHECK(predict_sum(ExponentialSmallTail{1.0, 1.0}, 0.5).formula() ==
        "c*eps^-g");
}
