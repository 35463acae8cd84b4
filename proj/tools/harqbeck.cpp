// Batch front end: outage / LTAT sweeps, rate optimization, and the
// built-in invariant selftest, driven by a JSON experiment config.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "harqbeck/commands.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitSelftest = 3;

struct CliArgs {
  std::string config_path;
  std::optional<std::string> out_path;
  harqbeck::RunOptions run;
  harqbeck::SelftestOptions selftest;
};

void add_run_options(CLI::App* cmd, CliArgs& args, bool needs_config) {
  auto* config =
      cmd->add_option("--config", args.config_path, "experiment config (JSON)");
  if (needs_config) config->required();
  cmd->add_option_function<std::string>(
      "--out", [&args](const std::string& v) { args.out_path = v; },
      "output path (overrides config output.path)");
  cmd->add_option("--streams", args.run.streams,
                  "Monte Carlo shard count (result is shard-invariant)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--timing", args.run.timing,
                "emit measured runtime_ms (off: 0, keeps output byte-stable)");
}

int run_sweep(const CliArgs& args,
              harqbeck::SweepReport (*command)(
                  const harqbeck::ExperimentConfig&,
                  const harqbeck::RunOptions&)) {
  const harqbeck::ExperimentConfig config =
      harqbeck::load_config(args.config_path);
  const harqbeck::SweepReport report = command(config, args.run);
  harqbeck::write_report(report, config.output, args.out_path);
  return kExitOk;
}

int run_selftest(const CliArgs& args) {
  const harqbeck::SelftestReport report = harqbeck::cmd_selftest(args.selftest);
  for (const auto& suite : report.suites)
    std::cout << (suite.pass ? "pass" : "FAIL") << "  " << suite.name << ": "
              << suite.detail << "\n";
  std::cout << (report.ok() ? "selftest passed" : "selftest FAILED") << "\n";
  return report.ok() ? kExitOk : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variable-rate HARQ-IR outage/throughput analysis"};
  app.require_subcommand(1);
  CliArgs args;

  auto* outage = app.add_subcommand(
      "outage", "Monte Carlo and asymptotic outage probability sweep");
  add_run_options(outage, args, true);

  auto* ltat =
      app.add_subcommand("ltat", "long-term average throughput sweep");
  add_run_options(ltat, args, true);

  auto* optimize = app.add_subcommand(
      "optimize", "rate selection maximizing LTAT under an outage constraint");
  add_run_options(optimize, args, true);
  optimize->add_flag("--grid-check", args.run.grid_check,
                     "also run the exhaustive grid baseline (K <= 4)");

  auto* selftest =
      app.add_subcommand("selftest", "run the built-in invariant suites");
  selftest->add_option("--config", args.config_path,
                       "accepted for interface symmetry; suites are built in");
  selftest->add_option("--suite", args.selftest.suite,
                       "run a single suite (g-oracle, symmetry, convexity, "
                       "scaling, sampler, continuity)");
  selftest->add_option("--delta-eq", args.selftest.delta_eq,
                       "override the closed/numeric dispatch threshold");
  selftest->add_option("--seed", args.selftest.seed, "suite RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (outage->parsed()) return run_sweep(args, harqbeck::cmd_outage);
    if (ltat->parsed()) return run_sweep(args, harqbeck::cmd_ltat);
    if (optimize->parsed()) return run_sweep(args, harqbeck::cmd_optimize);
    if (selftest->parsed()) return run_selftest(args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitValidation;
}
