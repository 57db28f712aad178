#include "smalldev/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "smalldev/errors.hpp"

namespace smalldev {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

struct LsFit {
  double a, b, rms;  // y = a + b x
};

LsFit least_squares(const std::vector<double>& xs,
                    const std::vector<double>& ys) {
  size_t n = xs.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0) throw FitError("eps grid collapsed to a single abscissa");
  double b = sxy / sxx;
  double a = my - b * mx;
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    double r = ys[i] - a - b * xs[i];
    ss += r * r;
  }
  return {a, b, std::sqrt(ss / double(n))};
}

}  // namespace

ConvergenceTable build_table(const SeriesSpec& series, Target target,
                             EstimatorMethod method,
                             const std::vector<double>& eps_grid,
                             const McParams& mc) {
  if (eps_grid.empty()) throw std::invalid_argument("eps grid is empty");
  for (size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0 && eps_grid[i] < 1.0))
      throw std::invalid_argument("eps values must lie in (0, 1)");
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
      throw std::invalid_argument("eps grid must be strictly decreasing");
  }
  if (method == EstimatorMethod::ExactProduct && target != Target::Sup)
    throw std::invalid_argument("the exact product applies to the sup only");
  if (method == EstimatorMethod::Chernoff && target != Target::Sum)
    throw std::invalid_argument("the chernoff bound applies to the sum only");

  ConvergenceTable table{series.dist(),
                         series.q(),
                         target,
                         method,
                         predict_for(series.dist(), series.q(), target),
                         {}};
  table.rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    TableRow row;
    row.epsilon = eps;
    row.predicted = table.prediction.evaluate(eps);
    try {
      TailEstimate est;
      switch (method) {
        case EstimatorMethod::ExactProduct:
          est = sup_exact_product(series, eps);
          break;
        case EstimatorMethod::Chernoff:
          est = sum_chernoff(series, eps);
          break;
        case EstimatorMethod::MonteCarlo:
          est = (target == Target::Sum)
                    ? sum_monte_carlo(series, eps, mc.n_samples, mc.seed,
                                      mc.trunc_tol, mc.workers)
                    : sup_monte_carlo(series, eps, mc.n_samples, mc.seed,
                                      mc.workers);
          break;
      }
      row.ok = true;
      row.ratio = est.neg_log_p / row.predicted;
      row.estimate = est;
      if (est.infinite) row.note = "probability zero at this eps";
    } catch (const RareEventError& e) {
      row.ok = false;
      row.ratio = std::numeric_limits<double>::quiet_NaN();
      row.note = e.what();
    } catch (const NumericalError& e) {
      row.ok = false;
      row.ratio = std::numeric_limits<double>::quiet_NaN();
      row.note = e.what();
    } catch (const CapabilityError& e) {
      row.ok = false;
      row.ratio = std::numeric_limits<double>::quiet_NaN();
      row.note = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string model_name(OrderFit::Model m) {
  return m == OrderFit::Model::PowerLaw ? "power_law" : "log_power";
}

OrderFit fit_order(const ConvergenceTable& table) {
  std::vector<double> x_pow, x_log, y;
  for (const auto& row : table.rows) {
    if (!row.ok || !row.estimate) continue;
    double v = row.estimate->neg_log_p;
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    double l = std::log(1.0 / row.epsilon);
    x_pow.push_back(l);
    x_log.push_back(std::log(l));
    y.push_back(std::log(v));
  }
  if (y.size() < 4)
    throw FitError("order fit needs at least 4 successful rows");
  double ymin = y[0], ymax = y[0];
  for (double v : y) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  if (ymax - ymin < 1e-12)
    throw FitError("estimates do not vary across the grid");

  LsFit pow_fit = least_squares(x_pow, y);
  LsFit log_fit = least_squares(x_log, y);
  OrderFit out;
  if (pow_fit.rms <= log_fit.rms) {
    out.model = OrderFit::Model::PowerLaw;
    out.constant = std::exp(pow_fit.a);
    out.exponent = pow_fit.b;
    out.residual = pow_fit.rms;
  } else {
    out.model = OrderFit::Model::LogPower;
    out.constant = std::exp(log_fit.a);
    out.exponent = log_fit.b;
    out.residual = log_fit.rms;
  }
  return out;
}

std::string to_csv(const ConvergenceTable& table) {
  std::string out = "epsilon,neg_log_p,method,error,predicted,ratio\n";
  for (const auto& row : table.rows) {
    out += fmt_g(row.epsilon);
    out += ',';
    if (row.ok && row.estimate) {
      out += fmt_g(row.estimate->neg_log_p);
      out += ',';
      out += method_name(table.method);
      out += ',';
      out += fmt_g(row.estimate->error);
      out += ',';
      out += fmt_g(row.predicted);
      out += ',';
      out += fmt_g(row.ratio);
    } else {
      out += "nan,";
      out += method_name(table.method);
      out += ',';
      out += sanitize(row.note);
      out += ',';
      out += fmt_g(row.predicted);
      out += ",nan";
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const ConvergenceTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r;
    r["epsilon"] = row.epsilon;
    r["ok"] = row.ok;
    r["predicted"] = row.predicted;
    if (std::isfinite(row.ratio))
      r["ratio"] = row.ratio;
    else
      r["ratio"] = row.ok ? "inf" : "nan";
    if (row.estimate) r["estimate"] = to_json(*row.estimate);
    if (!row.note.empty()) r["note"] = row.note;
    rows.push_back(std::move(r));
  }
  return nlohmann::json{{"dist", to_json(table.dist)},
                        {"q", table.q},
                        {"target", target_name(table.target)},
                        {"method", method_name(table.method)},
                        {"prediction", to_json(table.prediction)},
                        {"rows", std::move(rows)}};
}

nlohmann::json to_json(const OrderFit& fit) {
  return nlohmann::json{{"model", model_name(fit.model)},
                        {"constant", fit.constant},
                        {"exponent", fit.exponent},
                        {"residual", fit.residual}};
}

void write_plot_data(const ConvergenceTable& table,
                     const std::string& prefix) {
  std::ofstream est(prefix + ".estimate.dat");
  std::ofstream pred(prefix + ".predicted.dat");
  if (!est || !pred)
    throw std::runtime_error("cannot open plot data files under " + prefix);
  for (const auto& row : table.rows) {
    if (row.ok && row.estimate && std::isfinite(row.estimate->neg_log_p))
      est << fmt_g(row.epsilon) << ' ' << fmt_g(row.estimate->neg_log_p)
          << '\n';
    pred << fmt_g(row.epsilon) << ' ' << fmt_g(row.predicted) << '\n';
  }
}

}  // namespace smalldev
