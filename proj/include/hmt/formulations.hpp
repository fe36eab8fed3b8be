#pragma once

#include <string>
#include <vector>

#include "hmt/bem.hpp"
#include "hmt/common.hpp"
#include "hmt/fem.hpp"
#include "hmt/geometry.hpp"

namespace hmt {

enum class FormulationKind { costabel, stf, cstf, mtf, cmtf };

const char* to_string(FormulationKind k);
FormulationKind parse_formulation(const std::string& name);

struct IncidentWave {
  double k0 = 1.0;
  Point direction{1.0, 0.0};
  cplx amplitude = 1.0;

  static IncidentWave plane(double k0, double angle_radians, cplx amplitude = 1.0);
  cplx value(Point x) const;
  // d/dn of the incident field for the unit normal n.
  cplx normal_derivative(Point x, Point n) const;
};

// Dirichlet vertex samples and panel means (2-point Gauss) of the normal derivative.
TraceVec incident_traces(const IncidentWave& w, const CurveMesh& mesh);

// Everything a formulation needs besides its kind.
struct Problem {
  const Configuration* config = nullptr;
  MediumField medium = MediumField::constant(1.0);
  SourceField source;
  std::vector<WaveNumber> kappa;  // kappa_0 .. kappa_n
  IncidentWave wave;
  QuadratureSpec quad;

  const SubdomainPartition& partition() const { return config->partition; }
  const VolumeMesh& volume() const { return config->volume; }
  void validate(FormulationKind kind) const;
};

struct DofBlock {
  std::string name;
  int offset = 0;
  int size = 0;
};

// stf/cstf: [volume U, non-Sigma skeleton Dirichlet, skeleton Neumann]; Sigma skeleton vertices reuse
// their volume DOF. mtf/cmtf: [volume U, (u_j, p_j) for j = 1..n, p_Sigma]. costabel: [volume U, p_0]
// where p_0 = -p_Sigma is the Neumann trace on Gamma_0 in Gamma_0 orientation.
struct DofLayout {
  FormulationKind kind = FormulationKind::stf;
  int size = 0;
  std::vector<DofBlock> blocks;
  std::vector<int> skeleton_dir;  // single-trace: layout index per skeleton vertex
  int skeleton_neu_offset = 0;    // single-trace: first Neumann DOF (skeleton panel order)
  std::vector<int> part_offset;   // multi-trace: offset of (u_j, p_j), index j-1
  int p_sigma_offset = 0;         // multi-trace and costabel

  const DofBlock& block(const std::string& name) const;
};

DofLayout make_layout(FormulationKind kind, const SubdomainPartition& p, const VolumeMesh& volume);

struct DiscreteSystem {
  CMat matrix;
  CVec rhs;
  DofLayout layout;
  FormulationKind kind = FormulationKind::stf;
};

DiscreteSystem assemble(FormulationKind kind, const Problem& problem);

// Hermitian positive definite Gram matrix of a discrete energy norm on the layout:
// H1 on the volume; on traces the hypersingular (Dirichlet) and single layer (Neumann) operators at kappa = i.
RMat energy_gram(const DofLayout& layout, const Problem& problem);

struct SolveOptions {
  // sigma_min / sigma_max below this raises NearSingularError
  double near_singular_tol = 1e-10;
};

struct SolutionBundle {
  CVec x;
  FormulationKind kind = FormulationKind::stf;
  DofLayout layout;
  const Problem* problem = nullptr;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double residual = 0.0;
};

SolutionBundle solve(const DiscreteSystem& s, const Problem& problem, const SolveOptions& opt = {});

// Per-boundary traces implied by a solution (for reconstruction and diagnostics).
// single-trace kinds: u_j for j = 0..n. multi-trace kinds: u_j for j = 1..n (index 0 empty) plus the
// Sigma trace (gamma_dir U, p_Sigma).
struct SolutionTraces {
  std::vector<TraceVec> parts;
  TraceVec sigma;
  CVec volume;
};
SolutionTraces solution_traces(const SolutionBundle& b);

// Total field. Points closer to the skeleton than half the nearest panel length raise a domain error
// unless they lie inside Omega_Sigma, where the P1 interpolant is used.
CVec reconstruct(const SolutionBundle& b, const std::vector<Point>& points);

}  // namespace hmt
