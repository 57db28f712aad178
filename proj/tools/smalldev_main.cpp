#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smalldev/cli.hpp"

int main(int argc, char** argv) {
  using namespace smalldev::cli;

  CLI::App app{
      "Lower-tail estimates for geometrically weighted i.i.d. series: "
      "-log P(sum q^n X_n <= eps) and -log P(sup q^n X_n <= eps)."};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string eps_text;
  std::optional<std::uint64_t> seed;

  auto add_model = [&](CLI::App* c) {
    c->add_option("-d,--dist", cfg.dist_text,
                  "step law, e.g. exp:rate=1 or bernoulli:p0=0.5,a=1")
        ->required();
    c->add_option("-q,--ratio", cfg.q, "weight ratio q in (0,1)")->required();
    c->add_option("-t,--target", cfg.target, "sum or sup (default sum)");
  };

  CLI::App* predict = app.add_subcommand(
      "predict", "classify the step law and print the leading-order rate");
  add_model(predict);

  CLI::App* estimate = app.add_subcommand(
      "estimate", "convergence table of estimates against the prediction");
  add_model(estimate);
  estimate->add_option("-e,--eps", eps_text,
                       "comma-separated eps grid, strictly decreasing")
      ->required();
  estimate->add_option("-m,--method", cfg.method,
                       "exact | chernoff | mc (default: sup->exact, "
                       "sum->chernoff)");
  estimate->add_option("-n,--samples", cfg.n_samples,
                       "Monte Carlo sample count");
  estimate->add_option("--seed", seed, "RNG seed (fallback: SMALLDEV_SEED)");
  estimate->add_option("--trunc-tol", cfg.trunc_tol,
                       "Monte Carlo truncation tolerance, fraction of eps");
  estimate->add_option("-j,--workers", cfg.workers, "worker threads");
  estimate->add_flag("--fit", cfg.fit, "least-squares order fit on the grid");
  estimate->add_option("-o,--out", cfg.out, "report file (default stdout)");
  estimate->add_option("-f,--format", cfg.format, "csv or json");
  estimate->add_option("--plot", cfg.plot,
                       "prefix for two-column .dat plot files");

  CLI::App* verify = app.add_subcommand(
      "verify", "internal identity checks across the step-law catalog");
  verify->add_option("--fault-q-shift", cfg.fault_q_shift,
                     "perturb q in the functional-equation check")
      ->group("");  // maintenance hook, hidden from help

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  cfg.seed = seed;
  try {
    if (predict->parsed()) return cmd_predict(cfg, std::cout, std::cerr);
    if (estimate->parsed()) {
      try {
        cfg.eps = parse_eps_list(eps_text);
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
      }
      return cmd_estimate(cfg, std::cout, std::cerr);
    }
    return cmd_verify(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}
