#include "smalldev/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "smalldev/analysis.hpp"
#include "smalldev/asymptotics.hpp"
#include "smalldev/errors.hpp"
#include "smalldev/estimators.hpp"
#include "smalldev/series.hpp"

namespace smalldev::cli {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower((unsigned char)c));
  return s;
}

double parse_double(const std::string& s) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t p = s.find(sep, start);
    if (p == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

json tail_class_json(const TailClass& tc) {
  if (auto* a = std::get_if<AtomAtZero>(&tc))
    return json{{"kind", "atom_at_zero"}, {"p0", a->p0}};
  if (auto* p = std::get_if<PolynomialTail>(&tc))
    return json{{"kind", "polynomial"}, {"beta", p->beta}};
  if (auto* e = std::get_if<ExponentialSmallTail>(&tc))
    return json{{"kind", "exponential_small"}, {"K", e->K}, {"gamma", e->gamma}};
  return json{{"kind", "unclassified"}};
}

Target parse_target(const std::string& t) {
  std::string s = lower(t);
  if (s == "sum") return Target::Sum;
  if (s == "sup") return Target::Sup;
  throw std::invalid_argument("target must be 'sum' or 'sup'");
}

EstimatorMethod parse_method(const std::string& m, Target tgt) {
  std::string s = lower(m);
  if (s.empty()) return tgt == Target::Sup ? EstimatorMethod::ExactProduct
                                           : EstimatorMethod::Chernoff;
  if (s == "exact" || s == "exact_product") return EstimatorMethod::ExactProduct;
  if (s == "chernoff") return EstimatorMethod::Chernoff;
  if (s == "mc" || s == "monte_carlo") return EstimatorMethod::MonteCarlo;
  throw std::invalid_argument("method must be 'exact', 'chernoff', or 'mc'");
}

json config_json(const RunConfig& cfg, const DistributionSpec& dist,
                 Target tgt, EstimatorMethod method, std::uint64_t seed) {
  json j;
  j["dist"] = to_json(dist);
  j["q"] = cfg.q;
  j["target"] = target_name(tgt);
  j["method"] = method_name(method);
  j["eps"] = cfg.eps;
  j["n_samples"] = cfg.n_samples;
  j["seed"] = seed;
  j["trunc_tol"] = cfg.trunc_tol;
  j["workers"] = cfg.workers;
  j["format"] = cfg.format;
  return j;
}

bool write_text(const std::string& path, const std::string& text,
                std::ostream& fallback, std::ostream& err) {
  if (path.empty()) {
    fallback << text;
    return true;
  }
  std::ofstream f(path);
  if (!f) {
    err << "cannot open output file: " << path << "\n";
    return false;
  }
  f << text;
  return true;
}

struct VerifyReport {
  std::ostream& out;
  bool any_fail = false;

  void group_ok(const std::string& name, int cases, double worst,
                const char* what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "ok %s (%d cases, max %s %.3g)\n",
                  name.c_str(), cases, what, worst);
    out << buf;
  }
  void fail(const std::string& name, const std::string& detail) {
    out << "FAIL " << name << ": " << detail << "\n";
    any_fail = true;
  }
};

std::vector<DistributionSpec> verify_battery() {
  return {DistributionSpec::bernoulli_at_zero(0.5, 1.0),
          DistributionSpec::exponential(1.0),
          DistributionSpec::gamma(2.5, 1.5),
          DistributionSpec::power_of_half_normal(2.0),
          DistributionSpec::stable_totally_skewed(0.5, 1.0),
          DistributionSpec::stable_totally_skewed(0.3, 1.0),
          DistributionSpec::stable_totally_skewed(0.7, 0.8),
          DistributionSpec::inverse_weibull(2.0, 1.0),
          DistributionSpec::log_normal(0.0, 1.0)};
}

std::string dist_label(const DistributionSpec& d) {
  return to_json(d).dump();
}

}  // namespace

DistributionSpec parse_dist_spec(const std::string& text) {
  size_t colon = text.find(':');
  std::string name = lower(text.substr(0, colon));
  std::map<std::string, double> kv;
  if (colon != std::string::npos && colon + 1 < text.size()) {
    for (const std::string& part : split(text.substr(colon + 1), ',')) {
      size_t eq = part.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("expected key=value, got '" + part + "'");
      std::string key = lower(part.substr(0, eq));
      if (!kv.emplace(key, parse_double(part.substr(eq + 1))).second)
        throw std::invalid_argument("duplicate key '" + key + "'");
    }
  }

  auto take = [&kv](std::initializer_list<const char*> names,
                    std::optional<double> def) {
    for (const char* n : names) {
      auto it = kv.find(n);
      if (it != kv.end()) {
        double v = it->second;
        kv.erase(it);
        return v;
      }
    }
    if (def) return *def;
    throw std::invalid_argument(std::string("missing parameter '") +
                                *names.begin() + "'");
  };
  auto done = [&kv, &name]() {
    if (!kv.empty())
      throw std::invalid_argument("unknown parameter '" + kv.begin()->first +
                                  "' for " + name);
  };

  if (name == "bernoulli") {
    double p0 = take({"p0", "p"}, std::nullopt);
    double atom = take({"atom", "a"}, 1.0);
    done();
    return DistributionSpec::bernoulli_at_zero(p0, atom);
  }
  if (name == "exp" || name == "exponential") {
    double rate = take({"rate", "r"}, 1.0);
    done();
    return DistributionSpec::exponential(rate);
  }
  if (name == "gamma") {
    double shape = take({"shape", "k"}, std::nullopt);
    double rate = take({"rate", "r"}, 1.0);
    done();
    return DistributionSpec::gamma(shape, rate);
  }
  if (name == "halfnormalpow" || name == "half_normal_power" || name == "hnp") {
    double power = take({"power", "p"}, std::nullopt);
    done();
    return DistributionSpec::power_of_half_normal(power);
  }
  if (name == "stable") {
    double alpha = take({"alpha"}, std::nullopt);
    double k = take({"k"}, 1.0);
    done();
    return DistributionSpec::stable_totally_skewed(alpha, k);
  }
  if (name == "invweibull" || name == "inverse_weibull") {
    double shape = take({"shape", "k"}, std::nullopt);
    double scale = take({"scale", "s"}, 1.0);
    done();
    return DistributionSpec::inverse_weibull(shape, scale);
  }
  if (name == "lognormal" || name == "log_normal") {
    double mu = take({"mu", "m"}, 0.0);
    double sigma = take({"sigma", "s"}, 1.0);
    done();
    return DistributionSpec::log_normal(mu, sigma);
  }
  throw std::invalid_argument(
      "unknown distribution '" + name +
      "' (known: bernoulli, exp, gamma, halfnormalpow, stable, invweibull, "
      "lognormal)");
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : split(text, ','))
    out.push_back(parse_double(part));
  return out;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed) {
  if (cli_seed) return *cli_seed;
  if (const char* env = std::getenv("SMALLDEV_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 0);
    if (end == env || *end != '\0')
      throw std::invalid_argument("SMALLDEV_SEED is not an integer");
    return v;
  }
  return 0x5EEDull;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::optional<DistributionSpec> dist;
  Target tgt;
  try {
    dist.emplace(parse_dist_spec(cfg.dist_text));
    tgt = parse_target(cfg.target);
    if (!(cfg.q > 0.0 && cfg.q < 1.0))
      throw std::invalid_argument("q must be in (0, 1)");
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  json doc;
  doc["dist"] = to_json(*dist);
  doc["q"] = cfg.q;
  doc["target"] = cfg.target;
  doc["classification"] = tail_class_json(classify_tail(*dist));
  try {
    doc["prediction"] = to_json(predict_for(*dist, cfg.q, tgt));
  } catch (const CapabilityError& e) {
    doc["error"] = e.what();
    out << doc.dump(2) << "\n";
    err << "classification error: " << e.what() << "\n";
    return kClassificationError;
  }
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::optional<DistributionSpec> dist;
  Target tgt;
  EstimatorMethod method;
  std::uint64_t seed;
  try {
    dist.emplace(parse_dist_spec(cfg.dist_text));
    tgt = parse_target(cfg.target);
    method = parse_method(cfg.method, tgt);
    seed = resolve_seed(cfg.seed);
    if (cfg.format != "csv" && cfg.format != "json")
      throw std::invalid_argument("format must be 'csv' or 'json'");
    if (cfg.eps.empty())
      throw std::invalid_argument("eps grid is empty");
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  std::optional<SeriesSpec> series;
  try {
    series.emplace(*dist, cfg.q);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kRuntimeFailure;
  }

  McParams mc{cfg.n_samples, seed, cfg.trunc_tol, cfg.workers};
  std::optional<ConvergenceTable> table;
  try {
    table.emplace(build_table(*series, tgt, method, cfg.eps, mc));
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const CapabilityError& e) {
    err << "classification error: " << e.what() << "\n";
    return kClassificationError;
  }

  json fit_doc;
  if (cfg.fit) {
    try {
      fit_doc = to_json(fit_order(*table));
    } catch (const FitError& e) {
      fit_doc = json{{"fit_error", e.what()}};
    }
  }

  json cfg_doc = config_json(cfg, *dist, tgt, method, seed);
  if (cfg.format == "csv") {
    if (!write_text(cfg.out, to_csv(*table), out, err)) return kRuntimeFailure;
    if (!cfg.out.empty()) {
      json echo{{"config", cfg_doc}};
      if (cfg.fit) echo["fit"] = fit_doc;
      out << echo.dump() << "\n";
    } else if (cfg.fit) {
      err << json{{"fit", fit_doc}}.dump() << "\n";
    }
  } else {
    json doc{{"config", cfg_doc}, {"table", to_json(*table)}};
    if (cfg.fit) doc["fit"] = fit_doc;
    if (!write_text(cfg.out, doc.dump(2) + "\n", out, err))
      return kRuntimeFailure;
  }
  if (!cfg.plot.empty()) write_plot_data(*table, cfg.plot);

  bool any_ok = false;
  for (const auto& row : table->rows) any_ok = any_ok || row.ok;
  if (!any_ok) {
    err << "all rows failed\n";
    return kAllRowsFailed;
  }
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  (void)err;
  VerifyReport rep{out};
  const std::vector<double> qs = {0.3, 0.5, 0.9};
  const std::vector<double> lam_bracket = {1.5, 4.0, 64.0, 1e3, 1e6};
  const std::vector<double> lam_fe = {1.5, 20.0, 1e3};

  // bracket containment: lo <= F <= hi for lambda > 1
  {
    int cases = 0;
    double worst = 0.0;
    for (const auto& d : verify_battery()) {
      for (double q : qs) {
        SeriesSpec sp(d, q);
        for (double lam : lam_bracket) {
          LogLaplaceBracket br = f_bracket(sp, lam);
          double scale = std::max(1.0, br.hi);
          EvalResult fe = f_exact(sp, lam, 1e-10 * scale);
          double slack = fe.error_bound + 1e-12 * scale;
          double viol = std::max(br.lo - fe.value, fe.value - br.hi);
          worst = std::max(worst, viol / scale);
          ++cases;
          if (viol > slack) {
            char buf[200];
            std::snprintf(buf, sizeof(buf),
                          "q=%g lambda=%g F=%.12g outside [%.12g, %.12g]", q,
                          lam, fe.value, br.lo, br.hi);
            rep.fail("bracket-containment", dist_label(d) + " " + buf);
          }
        }
      }
    }
    if (!rep.any_fail)
      rep.group_ok("bracket-containment", cases, worst, "rel violation");
  }

  // functional equation F(q lambda) + G(lambda) = F(lambda)
  bool fe_failed = false;
  {
    int cases = 0;
    double worst = 0.0;
    for (const auto& d : verify_battery()) {
      for (double q : qs) {
        SeriesSpec sp(d, q);
        for (double lam : lam_fe) {
          double scale = std::max(1.0, f_bracket(sp, lam).hi);
          double tol = 1e-10 * scale;
          double res = check_functional_equation(sp, lam, tol,
                                                 cfg.fault_q_shift);
          worst = std::max(worst, res / scale);
          ++cases;
          if (res > 3.0 * tol) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "q=%g lambda=%g residual %.3g > %.3g", q, lam, res,
                          3.0 * tol);
            rep.fail("functional-equation", dist_label(d) + " " + buf);
            fe_failed = true;
          }
        }
      }
    }
    if (!fe_failed)
      rep.group_ok("functional-equation", cases, worst, "rel residual");
  }

  // stable steps: F(lambda) = K lambda^alpha / (1 - q^alpha) exactly
  {
    int cases = 0;
    double worst = 0.0;
    bool failed = false;
    for (double alpha : {0.3, 0.5, 0.7}) {
      for (double q : {0.3, 0.9}) {
        SeriesSpec sp(DistributionSpec::stable_totally_skewed(alpha, 1.0), q);
        for (double lam : {2.0, 1e4}) {
          double expect =
              std::pow(lam, alpha) / (1.0 - std::pow(q, alpha));
          double got = f_exact(sp, lam, 1e-11 * (1.0 + expect)).value;
          double rel = std::abs(got - expect) / expect;
          worst = std::max(worst, rel);
          ++cases;
          if (rel > 1e-9) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "alpha=%g q=%g lambda=%g rel err %.3g", alpha, q,
                          lam, rel);
            rep.fail("stable-closure", buf);
            failed = true;
          }
        }
      }
    }
    if (!failed) rep.group_ok("stable-closure", cases, worst, "rel err");
  }

  // Laplace-scale <-> tail-law transform round trips
  {
    int cases = 0;
    double worst = 0.0;
    bool failed = false;
    for (double gp : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      for (double kp : {0.5, 1.0, 2.0}) {
        auto [K, gamma] = exp_tail_transform({kp, gp});
        LaplaceScaleParams back = exp_tail_inverse(K, gamma);
        double rel = std::max(std::abs(back.k_prime - kp) / kp,
                              std::abs(back.gamma_prime - gp) / gp);
        worst = std::max(worst, rel);
        ++cases;
        if (rel > 1e-12) {
          char buf[160];
          std::snprintf(buf, sizeof(buf), "K'=%g gamma'=%g rel err %.3g", kp,
                        gp, rel);
          rep.fail("tail-transform-roundtrip", buf);
          failed = true;
        }
      }
    }
    if (!failed)
      rep.group_ok("tail-transform-roundtrip", cases, worst, "rel err");
  }

  // Tauberian guard: gamma >= 1 passes through, gamma < 1 rejected
  {
    int cases = 0;
    bool failed = false;
    for (auto [k, g] : {std::pair{1.0, 1.0}, {2.0, 1.5}}) {
      auto r = tauberian_tail_from_laplace(k, g);
      ++cases;
      if (r.first != k || r.second != g) {
        rep.fail("tauberian-guard", "identity broken above gamma = 1");
        failed = true;
      }
    }
    for (double g : {0.5, 0.99}) {
      ++cases;
      try {
        tauberian_tail_from_laplace(1.0, g);
        rep.fail("tauberian-guard", "gamma < 1 was not rejected");
        failed = true;
      } catch (const std::domain_error&) {
      }
      ++cases;
      try {
        tauberian_laplace_from_tail(1.0, g);
        rep.fail("tauberian-guard", "gamma < 1 was not rejected");
        failed = true;
      } catch (const std::domain_error&) {
      }
    }
    if (!failed) rep.group_ok("tauberian-guard", cases, 0.0, "violation");
  }

  if (rep.any_fail) {
    out << "verify: FAILED\n";
    return kVerifyFailed;
  }
  out << "verify: all checks passed\n";
  return kOk;
}

}  // namespace smalldev::cli
