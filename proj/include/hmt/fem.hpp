#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hmt/common.hpp"
#include "hmt/geometry.hpp"

namespace hmt {

// Wavenumber profile inside Omega_Sigma.
struct MediumField {
  enum class Kind { constant, radial_profile, table };
  Kind kind = Kind::constant;
  std::function<double(Point)> evaluator;

  double operator()(Point p) const { return evaluator(p); }
  static MediumField constant(double kappa);
  static MediumField radial(std::function<double(double)> profile);
  // "x y kappa" lines; values looked up at the nearest listed point.
  static MediumField table(const std::string& path);
  static MediumField table(std::vector<Point> points, std::vector<double> values);
};

struct SourceField {
  std::function<cplx(Point)> evaluator;

  cplx operator()(Point p) const { return evaluator ? evaluator(p) : cplx(0.0); }
  static SourceField zero() { return {}; }
};

struct FemBlocks {
  CMat a_sigma;
  CVec load;
  std::vector<int> trace_dir;  // Sigma vertex -> volume vertex
};

// integral of grad U . grad V - kappa^2 U V over the mesh; mass term by the edge-midpoint rule.
CMat assemble_a_sigma(const VolumeMesh& mesh, const MediumField& medium);
CVec assemble_load(const VolumeMesh& mesh, const SourceField& source);
std::vector<int> trace_dirichlet(const VolumeMesh& mesh);
FemBlocks assemble_fem(const VolumeMesh& mesh, const MediumField& medium, const SourceField& source);

RMat volume_mass(const VolumeMesh& mesh);

// Interior Dirichlet problem: a_sigma(U, V) = load(V) for all V vanishing on Sigma, U = boundary on Sigma.
CVec solve_interior_dirichlet(const VolumeMesh& mesh, const MediumField& medium, const SourceField& source,
                              const CVec& boundary_values);

// L2 distance between a P1 field and a function, 7-point triangle rule.
double l2_error(const VolumeMesh& mesh, const CVec& values, const std::function<cplx(Point)>& exact);
double l2_norm(const VolumeMesh& mesh, const std::function<cplx(Point)>& f);

// Index of a triangle containing p (with tolerance), or -1.
int find_triangle(const VolumeMesh& mesh, Point p);
// P1 interpolation; throws domain error outside the mesh.
cplx interpolate_p1(const VolumeMesh& mesh, const CVec& values, Point p);

}  // namespace hmt
