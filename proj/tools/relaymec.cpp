#include <iostream>

#include "CLI11.hpp"
#include "relaymec/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimal offloading through relays: DF-TDMA, DF-FDMA, "
               "AF, and the equal-allocation baseline"};
  app.require_subcommand(1);

  relaymec::cli::SolveOptions solve_opt;
  auto* solve = app.add_subcommand("solve", "Solve one scenario in one mode");
  solve->add_option("--config", solve_opt.config_path, "Scenario config (JSON)")
      ->required();
  solve->add_option("--mode", solve_opt.mode, "tdma|fdma|af|equal");
  solve->add_option("--seed", solve_opt.seed, "Override the channel seed");
  solve->add_option("--out", solve_opt.out, "Output path (default stdout)");

  relaymec::cli::SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Sweep D, T, or fB over a grid");
  sweep->add_option("--config", sweep_opt.config_path, "Scenario config (JSON)")
      ->required();
  sweep->add_option("--param", sweep_opt.param, "D|T|fB")->required();
  sweep->add_option("--from", sweep_opt.from, "Sweep start")->required();
  sweep->add_option("--to", sweep_opt.to, "Sweep end")->required();
  sweep->add_option("--steps", sweep_opt.steps, "Grid points (>= 2)")->required();
  sweep->add_option("--modes", sweep_opt.modes,
                    "Modes to run (default: all four)")
      ->delimiter(',');
  sweep->add_option("--seed", sweep_opt.seed, "Override the channel seed");
  sweep->add_option("--out", sweep_opt.out, "Output path (default stdout)");
  sweep->add_option("--format", sweep_opt.format, "csv|json");

  relaymec::cli::CompareOptions compare_opt;
  auto* compare = app.add_subcommand("compare", "Rank all four policies");
  compare->add_option("--config", compare_opt.config_path, "Scenario config (JSON)")
      ->required();
  compare->add_option("--seed", compare_opt.seed, "Override the channel seed");

  relaymec::cli::ValidateOptions validate_opt;
  auto* validate = app.add_subcommand("validate", "Run a named probe suite");
  validate->add_option("--config", validate_opt.config_path,
                       "Scenario config (JSON)")
      ->required();
  validate->add_option("--suite", validate_opt.suite,
                       "kkt|sca-descent|monotone-xbar|oracle-n1|oracle-n2|"
                       "equivalence")
      ->required();
  validate->add_option("--seed", validate_opt.seed, "Override the channel seed");
  validate->add_option("--out", validate_opt.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? relaymec::cli::kExitUsage : relaymec::cli::kExitOk;
  }

  if (solve->parsed())
    return relaymec::cli::run_solve(solve_opt, std::cout, std::cerr);
  if (sweep->parsed())
    return relaymec::cli::run_sweep(sweep_opt, std::cout, std::cerr);
  if (compare->parsed())
    return relaymec::cli::run_compare(compare_opt, std::cout, std::cerr);
  if (validate->parsed())
    return relaymec::cli::run_validate(validate_opt, std::cout, std::cerr);
  return relaymec::cli::kExitUsage;
}
