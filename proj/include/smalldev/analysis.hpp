#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smalldev/asymptotics.hpp"
#include "smalldev/distributions.hpp"
#include "smalldev/estimators.hpp"
#include "smalldev/series.hpp"

namespace smalldev {

struct McParams {
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 0x5EEDull;
  double trunc_tol = 1e-3;
  int workers = 1;
};

struct TableRow {
  double epsilon;
  bool ok;
  std::optional<TailEstimate> estimate;  // present iff ok
  double predicted;                      // leading-order prediction at eps
  double ratio;                          // estimate / predicted
  std::string note;                      // failure message when !ok
};

struct ConvergenceTable {
  DistributionSpec dist;
  double q;
  Target target;
  EstimatorMethod method;
  AsymptoticPrediction prediction;
  std::vector<TableRow> rows;
};

/// Runs the chosen estimator over a strictly decreasing eps grid in (0,1)
/// and pairs each value with the asymptotic prediction. Per-row estimator
/// failures (rare events, convergence) are recorded in the row; grid or
/// method/target mismatches throw std::invalid_argument, and an
/// unclassifiable law propagates CapabilityError from the predictor.
ConvergenceTable build_table(const SeriesSpec& series, Target target,
                             EstimatorMethod method,
                             const std::vector<double>& eps_grid,
                             const McParams& mc = {});

struct OrderFit {
  enum class Model { PowerLaw, LogPower };
  Model model;       // -log p ~ c (1/eps)^g or c (log 1/eps)^g
  double constant;   // c
  double exponent;   // g
  double residual;   // rms residual of log(-log p) under the chosen model
};

std::string model_name(OrderFit::Model m);

/// Least squares for log(-log p) against log(1/eps) and log log(1/eps);
/// keeps whichever transform is straighter. Needs >= 4 usable rows (ok,
/// finite, positive), otherwise FitError.
OrderFit fit_order(const ConvergenceTable& table);

/// Header: epsilon,neg_log_p,method,error,predicted,ratio. Failed rows put
/// the message in the error column and nan elsewhere.
std::string to_csv(const ConvergenceTable& table);

nlohmann::json to_json(const ConvergenceTable& table);
nlohmann::json to_json(const OrderFit& fit);

/// Writes <prefix>.estimate.dat (eps, -log p) and <prefix>.predicted.dat
/// (eps, prediction), two columns, ready for gnuplot.
void write_plot_data(const ConvergenceTable& table, const std::string& prefix);

}  // namespace smalldev
