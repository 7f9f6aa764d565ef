#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace introspect::cli;

  CLI::App app{"Introspection dynamics with mutation on binary-action games"};
  app.set_version_flag("--version", std::string(INTROSPECT_VERSION));
  app.require_subcommand(1);

  Options opts;
  std::string method;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* cfg = cmd->add_option("--config", opts.config, "Run config (JSON)")->check(CLI::ExistingFile);
    if (needs_config) cfg->required();
    cmd->add_option("--out", opts.out_dir,
                    std::string("Output directory (default: $") + kOutDirEnv + ")");
    cmd->add_option("--seed", opts.seed, "Base seed for simulation");
    cmd->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve", "Stationary cooperation by the configured method");
  add_common(solve, true);
  solve->add_option("--method", method, "closed_form | exact | simulate");

  auto* check = app.add_subcommand("check", "Additivity report for the configured game");
  add_common(check, true);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo replicates for the configured population");
  add_common(simulate, true);
  simulate->add_option("--method", method, "only 'simulate'");

  auto* figure = app.add_subcommand("figure", "CSV bundle for a figure or table");
  add_common(figure, false);
  figure->add_option("name", opts.figure, "fig1 | fig2 | fig3 | table1")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "table1"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSchemaError;
  }

  if (!method.empty()) opts.method = method;

  if (solve->parsed()) return cmd_solve(opts, std::cout, std::cerr);
  if (check->parsed()) return cmd_check(opts, std::cout, std::cerr);
  if (simulate->parsed()) return cmd_simulate(opts, std::cout, std::cerr);
  return cmd_figure(opts, std::cout, std::cerr);
}
