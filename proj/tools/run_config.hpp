#pragma once

#include <string>
#include <vector>

#include "hmt/studies.hpp"

namespace hmt::cli {

struct RunConfig {
  // [geometry]
  std::string geometry = "concentric";  // concentric | halfdisk | gap-demo | disk | external-mesh
  std::vector<double> radii{1.0, 2.0};
  std::vector<int> panels{32, 64};
  double volume_h = 0.0;  // 0 picks the boundary panel length
  std::string mesh_file;  // external-mesh only
  // [medium]
  double kappa0 = 1.0;
  std::vector<double> kappa{2.0};  // kappa_1 .. kappa_n
  std::string kappa_sigma = "1.5"; // number, "radial: c0, c1, ..." (polynomial in r) or "table: path"
  bool tie_kappa = false;          // sweeps move every kappa_j with kappa_0
  // [incident]
  double angle_deg = 0.0;
  double amplitude = 1.0;
  // [discretization]
  int quad_order = 8;
  double mie_tol = 1e-12;
  // [probe]
  double probe_radius = 3.0;
  int probe_angles = 256;
  // [grid]
  double grid_xmin = -3.0, grid_xmax = 3.0, grid_ymin = -3.0, grid_ymax = 3.0;
  int grid_nx = 61, grid_ny = 61;
  // [output]
  std::string prefix = "out/run";
  unsigned seed = 42;

  int n() const;
};

// INI file with [section] headers and key = value lines; unknown keys are config errors.
RunConfig load_run_config(const std::string& path);
void validate(const RunConfig& c);

// Geometry at refinement level l (panel counts doubled l times, volume h halved).
Configuration build_configuration(const RunConfig& c, int level = 0);
Problem build_problem(const RunConfig& c, double k0);
OwnedProblem build_owned(const RunConfig& c, double k0, int level = 0);

// Analytic reference when the geometry is a disk or two concentric circles with constant kappa_sigma.
bool has_mie(const RunConfig& c);
MieSolution build_mie(const RunConfig& c);

// 17 significant digits, '.' decimal.
std::string num(double v);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::string& path);

std::vector<Point> field_grid(const RunConfig& c);

int cmd_verify(const RunConfig& c, const std::vector<std::string>& ids);
int cmd_solve(const RunConfig& c, FormulationKind kind, double probe_radius);
int cmd_sweep(const RunConfig& c, FormulationKind kind, double kmin, double kmax, int steps);
int cmd_converge(const RunConfig& c, FormulationKind kind, int levels);
int cmd_mie(const RunConfig& c);

// Exit code for an error: 2 config-type, 3 near-singular, 4 anything else.
int exit_code(const Error& e);

}  // namespace hmt::cli
