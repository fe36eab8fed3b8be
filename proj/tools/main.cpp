#include <iostream>

#include "CLI11.hpp"
#include "run_config.hpp"

using namespace hmt;

int main(int argc, char** argv) {
  CLI::App app{"FEM-BEM coupling for Helmholtz transmission problems"};
  app.require_subcommand(1);
  std::string config_path;
  std::string formulation = "stf";

  auto* verify = app.add_subcommand("verify", "run the identity checks and print a PASS/FAIL table");
  std::vector<std::string> ids;
  verify->add_option("--config", config_path, "INI config (only the seed is used)");
  verify->add_option("--only", ids, "criterion ids, e.g. A1 A4");

  auto* solve = app.add_subcommand("solve", "solve and write probe-circle and field-grid CSVs");
  double probe = -1.0;
  solve->add_option("--config", config_path)->required();
  solve->add_option("--formulation", formulation, "costabel|stf|cstf|mtf|cmtf");
  solve->add_option("--probe", probe, "probe circle radius (default from config)");

  auto* sweep = app.add_subcommand("sweep", "smallest singular value over a kappa_0 grid");
  double kmin = 0.0, kmax = 0.0;
  int steps = 0;
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--formulation", formulation);
  sweep->add_option("--kmin", kmin)->required();
  sweep->add_option("--kmax", kmax)->required();
  sweep->add_option("--steps", steps)->required();

  auto* converge = app.add_subcommand("converge", "refinement study against the analytic solution");
  int levels = 3;
  converge->add_option("--config", config_path)->required();
  converge->add_option("--formulation", formulation);
  converge->add_option("--levels", levels);

  auto* mie = app.add_subcommand("mie", "evaluate the analytic solution only");
  mie->add_option("--config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cli::RunConfig cfg;
    if (!config_path.empty()) cfg = cli::load_run_config(config_path);
    if (verify->parsed()) return cli::cmd_verify(cfg, ids);
    const FormulationKind kind = parse_formulation(formulation);
    if (solve->parsed()) return cli::cmd_solve(cfg, kind, probe > 0.0 ? probe : cfg.probe_radius);
    if (sweep->parsed()) return cli::cmd_sweep(cfg, kind, kmin, kmax, steps);
    if (converge->parsed()) return cli::cmd_converge(cfg, kind, levels);
    if (mie->parsed()) return cli::cmd_mie(cfg);
  } catch (const NearSingularError& e) {
    std::cerr << "error: " << e.what() << " (sigma_min " << e.sigma_min() << ")" << std::endl;
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return cli::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  }
  return 0;
}
