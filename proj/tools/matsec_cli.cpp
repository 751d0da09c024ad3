// Command-line harness: `run` executes trials and writes a CSV of per-trial
// records, `verify` runs the exact/Monte-Carlo bound suites, and `opt`
// prints the offline optimum of an instance/weights pair.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "matsec/matsec.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::optional<std::string> family, weight_scheme, algorithm, order, output;
  std::optional<std::string> instance, weights;
  std::optional<int> n, k, tau, delta, order_k, workers;
  std::optional<std::int64_t> trials, mc_trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> p_s, spread_base;
  bool monte_carlo = false;
  bool axioms = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "config file (key = value lines)");
  cmd->add_option("--family", opt.family,
                  "uniform | partition | graphic | laminar | transversal");
  cmd->add_option("--n", opt.n, "ground set size");
  cmd->add_option("--k", opt.k,
                  "family parameter (uniform k, graphic vertices, transversal lefts)");
  cmd->add_option("--weight-scheme", opt.weight_scheme,
                  "uniform-random | exponential-spread | adversarial-geometric | from-file");
  cmd->add_option("--spread-base", opt.spread_base, "base of exponential-spread");
  cmd->add_option("--algorithm", opt.algorithm,
                  "full | bucketing-fixed | aided-wrapped | classical-baseline");
  cmd->add_option("--tau", opt.tau, "fixed bucket width exponent");
  cmd->add_option("--delta", opt.delta, "fixed bucket shift");
  cmd->add_option("--order", opt.order,
                  "random | increasing | decreasing | worst-of-k");
  cmd->add_option("--order-k", opt.order_k, "resamples for worst-of-k");
  cmd->add_option("--trials", opt.trials, "number of trials");
  cmd->add_option("--seed", opt.seed, "root seed (mandatory)");
  cmd->add_option("--output", opt.output, "CSV output path (default: stdout)");
  cmd->add_option("--p-s", opt.p_s, "sampling probability override");
  cmd->add_option("--workers", opt.workers, "worker threads");
  cmd->add_flag("--monte-carlo", opt.monte_carlo,
                "verify beyond the exact budget with Monte Carlo");
  cmd->add_option("--mc-trials", opt.mc_trials, "Monte Carlo trial count");
  cmd->add_flag("--axioms", opt.axioms, "run the exhaustive axiom suite");
  cmd->add_option("--instance", opt.instance, "instance file");
  cmd->add_option("--weights", opt.weights, "weights file");
}

matsec::ExperimentConfig build_config(const CliOptions& opt) {
  matsec::ExperimentConfig cfg;
  if (!opt.config_path.empty()) cfg = matsec::parse_config_file(opt.config_path);
  if (opt.family) cfg.family = *opt.family;
  if (opt.n) cfg.n = *opt.n;
  if (opt.k) cfg.k = *opt.k;
  if (opt.weight_scheme) cfg.weight_scheme = *opt.weight_scheme;
  if (opt.spread_base) cfg.spread_base = *opt.spread_base;
  if (opt.algorithm) cfg.algorithm = *opt.algorithm;
  if (opt.tau) cfg.tau = *opt.tau;
  if (opt.delta) cfg.delta = *opt.delta;
  if (opt.order) cfg.order = *opt.order;
  if (opt.order_k) cfg.order_k = *opt.order_k;
  if (opt.trials) cfg.trials = static_cast<std::uint64_t>(*opt.trials);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.output) cfg.output = *opt.output;
  if (opt.p_s) cfg.p_s = *opt.p_s;
  if (opt.workers) cfg.workers = *opt.workers;
  if (opt.monte_carlo) cfg.monte_carlo = true;
  if (opt.mc_trials) cfg.mc_trials = static_cast<std::uint64_t>(*opt.mc_trials);
  if (opt.axioms) cfg.axioms = true;
  if (opt.instance) cfg.instance_path = *opt.instance;
  if (opt.weights) cfg.weights_path = *opt.weights;
  return cfg;
}

template <typename Fn>
int with_output(const matsec::ExperimentConfig& cfg, Fn&& fn) {
  if (cfg.output.empty()) return fn(std::cout);
  std::ofstream out(cfg.output);
  if (!out)
    throw std::ios_base::failure("cannot open output file: " + cfg.output);
  return fn(out);
}

int dispatch(const std::string& command, const CliOptions& opt) {
  using namespace matsec;
  if (command == "opt") {
    if (!opt.instance || !opt.weights)
      throw ConfigError("opt needs --instance and --weights");
    return opt_command(*opt.instance, *opt.weights, std::cout);
  }
  const ExperimentConfig cfg = build_config(opt);
  if (command == "run")
    return with_output(cfg, [&](std::ostream& csv) {
      return run_experiment(cfg, csv, std::cout);
    });
  if (command == "verify")
    return with_output(cfg, [&](std::ostream& csv) {
      return verify_experiment(cfg, csv, std::cout);
    });
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matroid online-selection experiment harness"};
  app.require_subcommand(1);
  CliOptions opt;
  auto* run = app.add_subcommand("run", "execute trials, write a CSV of records");
  auto* verify = app.add_subcommand("verify", "run the bound verification suites");
  auto* optimum = app.add_subcommand("opt", "print the offline optimum");
  add_common_options(run, opt);
  add_common_options(verify, opt);
  optimum->add_option("--instance", opt.instance, "instance file")->required();
  optimum->add_option("--weights", opt.weights, "weights file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : matsec::exit_code::kConfigError;
  }

  const std::string command = run->parsed()      ? "run"
                              : verify->parsed() ? "verify"
                                                 : "opt";
  try {
    return dispatch(command, opt);
  } catch (const matsec::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return matsec::exit_code::kConfigError;
  } catch (const matsec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return matsec::exit_code::kConfigError;
  } catch (const matsec::BudgetExceededError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return matsec::exit_code::kBudgetExceeded;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return matsec::exit_code::kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "infeasible parameters: " << e.what() << "\n";
    return matsec::exit_code::kInfeasibleParams;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return matsec::exit_code::kCheckFailed;
  }
}
