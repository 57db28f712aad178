#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smalldev/distributions.hpp"

namespace smalldev::cli {

// Exit codes shared by every command.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeFailure = 1;
inline constexpr int kClassificationError = 2;  // tail class has no predictor
inline constexpr int kAllRowsFailed = 3;
inline constexpr int kConfigError = 4;
inline constexpr int kVerifyFailed = 5;

struct RunConfig {
  std::string dist_text;               // mini-syntax, e.g. "exp:rate=1"
  double q = 0.5;
  std::string target = "sum";          // "sum" | "sup"
  std::string method;                  // "exact" | "chernoff" | "mc";
                                       // empty = per-target default
  std::vector<double> eps;
  std::uint64_t n_samples = 100000;
  std::optional<std::uint64_t> seed;   // fallback: SMALLDEV_SEED, then 0x5EED
  double trunc_tol = 1e-3;
  int workers = 1;
  bool fit = false;
  std::string out;                     // report file; empty = stdout
  std::string format = "csv";          // "csv" | "json"
  std::string plot;                    // plot-data prefix; empty = none
  double fault_q_shift = 0.0;          // verify negative control (hidden)
};

/// "name:key=val,key=val". Names: bernoulli, exp, gamma, halfnormalpow,
/// stable, invweibull, lognormal (plus the JSON kinds as aliases). Throws
/// std::invalid_argument on anything malformed.
DistributionSpec parse_dist_spec(const std::string& text);

/// Comma-separated doubles; ordering and range are checked downstream.
std::vector<double> parse_eps_list(const std::string& text);

/// --seed, else SMALLDEV_SEED, else 0x5EED.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed);

/// Classification plus the leading-order prediction, as JSON on `out`.
int cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Convergence table over the eps grid. CSV goes to cfg.out (stdout when
/// empty) with the resolved config echoed as JSON on `out`; format "json"
/// bundles config, table, and fit into one document. Reruns with the same
/// config are byte-identical.
int cmd_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Self-checks: bracket containment, the functional equation, closed-form
/// agreement for stable steps, transform round trips, and the Tauberian
/// domain guard. One line per group; any FAIL exits kVerifyFailed.
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace smalldev::cli
