#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "novikov/commands.hpp"
#include "novikov/output.hpp"
#include "novikov/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral solver for the weakly dissipative two-component Novikov system"};
  app.set_version_flag("--version", std::string(novikov::tool_version()));
  app.require_subcommand(1);
  app.footer(std::string("Relative output directories are placed under $") +
             novikov::kOutputRootEnv + " when it is set.");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one scenario (exit 0 completed, 2 breaking, 1 error)");
  run->add_option("config", config_path, "Scenario config file")->required();

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product of a sweep file");
  sweep->add_option("sweepfile", sweep_path, "Sweep file")->required();

  novikov::VerifyOptions verify_opts;
  bool list_checks = false;
  auto* verify = app.add_subcommand("verify", "Run the built-in invariant suite");
  verify->add_option("--filter", verify_opts.filter, "Only run checks whose name contains this");
  verify->add_flag("--list", list_checks, "List check names and exit");

  std::string convergence_path;
  auto* convergence =
      app.add_subcommand("convergence", "Time ladder, refinement pair and perturbation pair");
  convergence->add_option("config", convergence_path, "Scenario config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : novikov::kExitFailure;
  }

  if (*run) return novikov::cmd_run(config_path, std::cout, std::cerr);
  if (*sweep) return novikov::cmd_sweep(sweep_path, std::cout, std::cerr);
  if (*convergence) return novikov::cmd_convergence(convergence_path, std::cout, std::cerr);
  if (list_checks) {
    for (const auto& name : novikov::verify_check_names()) std::cout << name << '\n';
    return 0;
  }
  return novikov::cmd_verify(verify_opts, std::cout, std::cerr);
}
