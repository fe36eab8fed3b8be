#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hmt/formulations.hpp"
#include "hmt/mie.hpp"

namespace hmt {

// A problem together with the configuration it points at.
struct OwnedProblem {
  std::shared_ptr<Configuration> config;
  Problem problem;
};

OwnedProblem own(Configuration config, Problem problem);

struct SweepRow {
  double k0 = 0.0;
  double sigma_min = 0.0;        // plain 2-norm
  double sigma_min_energy = 0.0; // in the discrete energy norm of the layout
  double condition = 0.0;        // sigma_max / sigma_min, plain
  FormulationKind kind = FormulationKind::stf;
};

struct SweepOptions {
  bool energy_norm = true;
};

// One row per grid value in grid order; problem_at builds the problem for a given kappa_0.
std::vector<SweepRow> sweep_sigma_min(FormulationKind kind, const std::function<OwnedProblem(double)>& problem_at,
                                      const std::vector<double>& grid, const SweepOptions& opt = {});

std::vector<double> linspace(double lo, double hi, int steps);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  int dofs = 0;
  double error = 0.0;  // relative L2 on the probe circle
  double order = 0.0;  // vs previous level, 0 on the first
  double seconds = 0.0;
};

struct ConvergenceOptions {
  double probe_radius = 3.0;
  int probe_angles = 256;
};

std::vector<ConvergenceRow> convergence_study(FormulationKind kind,
                                              const std::function<OwnedProblem(int)>& problem_at_level,
                                              int levels, const std::function<cplx(Point)>& exact,
                                              const ConvergenceOptions& opt = {});

std::vector<Point> probe_circle(double r, int n);

// Relative discrete L2 distance (trapezoid on equispaced angles).
double relative_l2(const CVec& approx, const CVec& exact);

}  // namespace hmt
