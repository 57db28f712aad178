#include "smalldev/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "smalldev/distributions.hpp"
#include "smalldev/errors.hpp"
#include "smalldev/numerics.hpp"

namespace smalldev {

namespace {

constexpr std::uint64_t kChunk = 65536;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("eps must be positive and finite");
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t c) {
  return num::splitmix64(num::splitmix64(seed) +
                         0x9E3779B97F4A7C15ull * (c + 1));
}

// Chunks own disjoint sample ranges and disjoint RNG streams, so the hit
// count is a pure function of (seed, n_samples) regardless of scheduling.
template <class HitFn>
void run_chunk_range(std::uint64_t n_samples, std::uint64_t seed, int workers,
                     std::uint64_t c0, std::uint64_t c1, const HitFn& fn,
                     std::vector<std::uint64_t>& hits) {
  std::atomic<std::uint64_t> next{c0};
  auto work = [&]() {
    for (;;) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= c1) return;
      std::uint64_t lo = c * kChunk;
      std::uint64_t hi = std::min(n_samples, lo + kChunk);
      std::mt19937_64 rng(chunk_seed(seed, c));
      std::uint64_t h = 0;
      for (std::uint64_t i = lo; i < hi; ++i) h += fn(rng) ? 1 : 0;
      hits[c] = h;
    }
  };
  int nw = std::max(1, std::min<int>(workers, int(c1 - c0)));
  if (nw == 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int i = 0; i < nw; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

[[noreturn]] void throw_rare(std::uint64_t hits, std::uint64_t samples,
                             bool projected) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%s%llu hits in %llu samples; need at least 10 for a 99%% "
                "interval, raise n_samples or eps",
                projected ? "projecting under 10 hits: " : "",
                (unsigned long long)hits, (unsigned long long)samples);
  throw RareEventError(buf);
}

// Smallest N (>= n_min) with sum_{n >= N} bound(n) <= target, for bound
// sequences whose successive ratios do not increase; the evaluated table is
// closed with a geometric extrapolation of the last ratio.
long depth_from_bounds(const std::function<double(long)>& bound, double target,
                       long n_min) {
  std::vector<double> b;
  for (;;) {
    double v = bound((long)b.size());
    b.push_back(v);
    if (v <= 0.0) break;
    if (b.size() >= 2) {
      double prev = b[b.size() - 2];
      if (v < prev && v <= 0.5 * target &&
          num::geometric_tail_bound(v, prev) <= 0.5 * target)
        break;
    }
    if (b.size() > 200000)
      throw NumericalError(
          "tail-bound series for the truncation depth did not converge",
          b.back());
  }
  double rem = 0.0;
  if (b.back() > 0.0 && b.size() >= 2)
    rem = num::geometric_tail_bound(b.back(), b[b.size() - 2]);
  double suffix = rem;
  long n = (long)b.size();
  while (n > n_min && suffix + b[n - 1] <= target) {
    suffix += b[n - 1];
    --n;
  }
  return std::max<long>(n, n_min);
}

// P(X > t) <= E min(1, X/t) <= (1 - e^{-G(1/t)}) / (1 - 1/e), using
// min(1, y) <= (1 - e^{-y}) / (1 - e^{-1}) for y >= 0.
double laplace_exceed_bound(const DistributionSpec& d, double t) {
  if (!(t < 1e300)) return 0.0;
  double g = log_laplace(d, 1.0 / t);
  return std::min(1.0, -std::expm1(-g) / (1.0 - std::exp(-1.0)));
}

// Number of leading terms so the discarded tail of sum q^n X_n exceeds
// delta = trunc_tol * eps with probability <= 1/(10 n_samples). With a mean,
// Markov on the tail sum itself; otherwise split delta geometrically over
// the discarded terms and bound each through the Laplace transform.
long sum_terms_needed(const SeriesSpec& sp, double eps, double trunc_tol,
                      std::uint64_t n_samples) {
  const double q = sp.q();
  const double delta = trunc_tol * eps;
  if (auto m = mean(sp.dist())) {
    double lhs = *m * q / (1.0 - q);  // E sum_{n > N} q^n X at N = 0
    long n = 0;
    while (lhs > delta) {
      lhs *= q;
      if (++n > 2000000)
        throw NumericalError("monte carlo truncation depth exceeds 2e6", lhs);
    }
    return n + 1;
  }
  const double s = std::sqrt(q);
  const double target = 1.0 / (10.0 * double(n_samples));
  auto bound = [&](long n) {
    double t = delta * (1.0 - s) * std::pow(s / q, double(n));
    return laplace_exceed_bound(sp.dist(), t);
  };
  return depth_from_bounds(bound, target, 1);
}

// For the sup only terms with q^n X_n possibly above eps matter. Bounded
// steps give an exact cutoff; otherwise a union bound over P(q^n X > eps).
long sup_terms_needed(const SeriesSpec& sp, double eps,
                      std::uint64_t n_samples) {
  const double q = sp.q();
  if (auto* b = std::get_if<BernoulliAtZero>(&sp.dist().law())) {
    long n = 0;
    double top = b->atom;
    while (top > eps) {
      top *= q;
      if (++n > 2000000)
        throw NumericalError("sup truncation depth exceeds 2e6", top);
    }
    return n;
  }
  const double target = 1.0 / (10.0 * double(n_samples));
  auto bound = [&](long n) {
    return laplace_exceed_bound(sp.dist(), eps / std::pow(q, double(n)));
  };
  return depth_from_bounds(bound, target, 1);
}

TailEstimate mc_counting(const SeriesSpec& sp, Target tgt, double eps,
                         std::uint64_t n_samples, std::uint64_t seed,
                         int workers, long terms) {
  if (n_samples < 100)
    throw std::invalid_argument("n_samples must be at least 100");
  if (workers < 1 || workers > 1024)
    throw std::invalid_argument("workers must be in [1, 1024]");

  const DistributionSpec& d = sp.dist();
  std::vector<double> w((size_t)terms);
  for (long k = 0; k < terms; ++k) w[(size_t)k] = std::pow(sp.q(), double(k));

  std::function<bool(std::mt19937_64&)> fn;
  if (tgt == Target::Sum) {
    fn = [&d, &w, eps](std::mt19937_64& g) {
      double acc = 0.0;
      for (double wk : w) {
        acc += wk * sample(d, g);
        if (!(acc <= eps)) return false;
      }
      return true;
    };
  } else {
    fn = [&d, &w, eps](std::mt19937_64& g) {
      for (double wk : w)
        if (!(wk * sample(d, g) <= eps)) return false;
      return true;
    };
  }

  std::uint64_t n_chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(n_chunks, 0);
  std::uint64_t pilot = (n_chunks >= 4) ? std::max<std::uint64_t>(2, n_chunks / 8) : 0;
  if (pilot > 0) {
    run_chunk_range(n_samples, seed, workers, 0, pilot, fn, hits);
    std::uint64_t h1 = 0;
    for (std::uint64_t c = 0; c < pilot; ++c) h1 += hits[c];
    std::uint64_t s1 = pilot * kChunk;
    if (s1 >= 100000 && double(h1) * double(n_samples) / double(s1) < 10.0)
      throw_rare(h1, s1, true);
    run_chunk_range(n_samples, seed, workers, pilot, n_chunks, fn, hits);
  } else {
    run_chunk_range(n_samples, seed, workers, 0, n_chunks, fn, hits);
  }

  std::uint64_t h = 0;
  for (auto c : hits) h += c;
  if (h < 10) throw_rare(h, n_samples, false);

  const double z = 2.5758293035489004;  // 99% two-sided normal quantile
  double n = double(n_samples);
  double p = double(h) / n;
  double denom = 1.0 + z * z / n;
  double center = (p + z * z / (2.0 * n)) / denom;
  double half =
      z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  double p_lo = center - half;
  double p_hi = std::min(1.0, center + half);

  TailEstimate est;
  est.target = tgt;
  est.epsilon = eps;
  est.neg_log_p = -std::log(p);
  est.method = EstimatorMethod::MonteCarlo;
  est.error_kind = TailEstimate::ErrorKind::ConfidenceInterval99;
  est.error = 0.5 * (std::log(p_hi) - std::log(p_lo));
  est.truncation = terms;
  est.mc = McInfo{n_samples, seed, h};
  return est;
}

}  // namespace

std::string method_name(EstimatorMethod m) {
  switch (m) {
    case EstimatorMethod::ExactProduct: return "exact_product";
    case EstimatorMethod::Chernoff: return "chernoff";
    case EstimatorMethod::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

TailEstimate sup_exact_product(const SeriesSpec& series, double eps,
                               double tol) {
  require_eps(eps);
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const DistributionSpec& d = series.dist();
  const double q = series.q();

  num::KahanSum acc;
  double prev_x = -1.0;
  double rem = 0.0;
  long n = 0;
  for (;; ++n) {
    if (n > 500000)
      throw NumericalError("exact product did not converge in 5e5 factors",
                           rem);
    double t = eps / std::pow(q, double(n));
    double lc = log_cdf(d, t);
    if (std::isinf(lc)) {
      TailEstimate est;
      est.target = Target::Sup;
      est.epsilon = eps;
      est.neg_log_p = kInf;
      est.method = EstimatorMethod::ExactProduct;
      est.error_kind = TailEstimate::ErrorKind::CertifiedAbsolute;
      est.error = 0.0;
      est.truncation = n + 1;
      est.infinite = true;
      return est;
    }
    acc.add(-lc);
    double x = -std::expm1(lc);  // P(X > t)
    if (x <= 0.0) {
      // cdf hit 1 exactly; every later factor is 1
      rem = 0.0;
      ++n;
      break;
    }
    // x_n decays with log-convex tails for every supported law, so the last
    // observed ratio dominates all later ones and closes the product:
    // sum_{m>n} -log(1-x_m) <= (x_n/(1-x_n)) rho/(1-rho).
    if (prev_x > 0.0 && x < prev_x) {
      double rho = x / prev_x;
      rem = x / (1.0 - x) * rho / (1.0 - rho);
      if (rem <= 0.5 * tol) {
        ++n;
        break;
      }
    }
    prev_x = x;
  }

  double slack = (2.3e-16 * double(n) + 1e-13) * std::abs(acc.value());
  TailEstimate est;
  est.target = Target::Sup;
  est.epsilon = eps;
  est.neg_log_p = acc.value();
  est.method = EstimatorMethod::ExactProduct;
  est.error_kind = TailEstimate::ErrorKind::CertifiedAbsolute;
  est.error = rem + slack;
  est.truncation = n;
  return est;
}

TailEstimate sum_chernoff(const SeriesSpec& series, double eps) {
  require_eps(eps);
  // phi(t) = F(e^t) - e^t eps is concave in lambda, unimodal in t; the sum
  // tolerance tracks the lambda*eps scale so deep-descent probes stay cheap.
  long last_terms = 0;
  auto phi = [&](double t) {
    double lam = std::exp(t);
    EvalResult r = f_exact(series, lam, 1e-11 * (1.0 + lam * eps));
    last_terms = r.terms;
    return r.value - lam * eps;
  };

  const double step = std::log(2.0);
  std::map<long, double> vals;
  auto at = [&](long j) {
    auto it = vals.find(j);
    if (it != vals.end()) return it->second;
    double v = phi(double(j) * step);
    vals.emplace(j, v);
    return v;
  };

  long best = 0;
  bool fell_off = false;
  for (;;) {
    double vb = at(best);
    if (at(best + 1) > vb) {
      ++best;
      if (double(best) * step > 650.0)
        throw NumericalError("chernoff maximizer beyond lambda = e^650",
                             double(best) * step);
      continue;
    }
    if (at(best - 1) > vb) {
      --best;
      if (double(best) * step < -45.0) {
        fell_off = true;  // sup approached only as lambda -> 0, value -> 0
        break;
      }
      continue;
    }
    break;
  }

  TailEstimate est;
  est.target = Target::Sum;
  est.epsilon = eps;
  est.method = EstimatorMethod::Chernoff;
  est.error_kind = TailEstimate::ErrorKind::CertifiedLowerBound;
  if (!fell_off) {
    auto g = num::golden_max([&](double t) { return phi(t); },
                             double(best - 1) * step, double(best + 1) * step,
                             1e-10 * (1.0 + std::abs(double(best) * step)));
    double lam = std::exp(g.x);
    EvalResult r = f_exact(series, lam, 1e-11 * (1.0 + lam * eps));
    double val = r.value - lam * eps;
    if (val > 0.0) {
      est.neg_log_p = val;
      est.error = r.error_bound;
      est.truncation = r.terms;
      est.chernoff_lambda = lam;
      return est;
    }
  }
  est.neg_log_p = 0.0;  // trivial bound; eps is at or above the mean scale
  est.error = 0.0;
  est.truncation = last_terms;
  est.degenerate = true;
  return est;
}

TailEstimate sum_monte_carlo(const SeriesSpec& series, double eps,
                             std::uint64_t n_samples, std::uint64_t seed,
                             double trunc_tol, int workers) {
  require_eps(eps);
  if (!(trunc_tol > 0.0 && trunc_tol <= 0.5))
    throw std::invalid_argument("trunc_tol must be in (0, 0.5]");
  long terms = sum_terms_needed(series, eps, trunc_tol, n_samples);
  return mc_counting(series, Target::Sum, eps, n_samples, seed, workers,
                     terms);
}

TailEstimate sup_monte_carlo(const SeriesSpec& series, double eps,
                             std::uint64_t n_samples, std::uint64_t seed,
                             int workers) {
  require_eps(eps);
  long terms = sup_terms_needed(series, eps, n_samples);
  return mc_counting(series, Target::Sup, eps, n_samples, seed, workers,
                     terms);
}

nlohmann::json to_json(const TailEstimate& est) {
  nlohmann::json j;
  j["target"] = target_name(est.target);
  j["epsilon"] = est.epsilon;
  if (est.infinite)
    j["neg_log_p"] = "inf";
  else
    j["neg_log_p"] = est.neg_log_p;
  j["method"] = method_name(est.method);
  switch (est.error_kind) {
    case TailEstimate::ErrorKind::CertifiedAbsolute:
      j["error_kind"] = "certified_absolute";
      break;
    case TailEstimate::ErrorKind::CertifiedLowerBound:
      j["error_kind"] = "certified_lower_bound";
      break;
    case TailEstimate::ErrorKind::ConfidenceInterval99:
      j["error_kind"] = "ci99";
      break;
  }
  j["error"] = est.error;
  j["truncation"] = est.truncation;
  j["infinite"] = est.infinite;
  j["degenerate"] = est.degenerate;
  if (est.chernoff_lambda) j["chernoff_lambda"] = *est.chernoff_lambda;
  if (est.mc) {
    j["mc"] = {{"n_samples", est.mc->n_samples},
               {"seed", est.mc->seed},
               {"hits", est.mc->hits}};
  }
  return j;
}

}  // namespace smalldev
