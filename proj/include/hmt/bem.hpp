#pragma once

#include <vector>

#include "hmt/common.hpp"
#include "hmt/geometry.hpp"
#include "hmt/special_functions.hpp"
#include "hmt/trace_algebra.hpp"

namespace hmt {

enum class SelfPanelRule { log_split_analytic, graded_subdivision };

struct QuadratureSpec {
  int gauss_order = 8;
  SelfPanelRule self_panel_rule = SelfPanelRule::log_split_analytic;
  int graded_levels = 4;        // geometric grading toward singular corners
  double near_threshold = 1.0;  // pairs closer than this many panel lengths get subdivided
  int near_levels = 3;
  double far_threshold = 4.0;   // pairs farther than this use far_order
  int far_order = 5;

  void validate() const;
};

// Galerkin blocks on one closed boundary (rows = test, cols = trial):
//   V  (P0 x P0)  <SL p, q>
//   K  (P0 x P1)  <{gamma_D DL u}, q>, kernel n_y . grad G(x - y)
//   Kp (P1 x P0)  <{gamma_N SL p}, v>, kernel n_x . grad G(x - y)
//   W  (P1 x P1)  <gamma_N DL u, v>, arc-length (Maue) form
// bilinear: matrix of (u, v) -> [A u, theta v] with rows (v, q), cols (u, p): [[W, Kp], [K, V]].
struct OperatorBlockMatrix {
  CMat V, K, Kp, W;
  CMat bilinear;
};

OperatorBlockMatrix assemble_block(const WaveNumber& k, const CurveMesh& mesh, const QuadratureSpec& quad = {});

// Matrix of (u on source, v on target) -> [gamma^target G^source(u), theta v]_target.
// On panels shared by both boundaries the target trace is the exterior one with
// respect to the source region.
struct CrossBlock {
  CMat matrix;
  CMat V, K, Kp, W;
  bool shared_panel_correction = false;
};

CrossBlock assemble_cross(const WaveNumber& k, const CurveMesh& source, const CurveMesh& target,
                          const QuadratureSpec& quad = {});
// Boundaries by id: 0..n for Gamma_j, n+1 for Sigma.
CrossBlock assemble_cross(const WaveNumber& k, int source, int target, const SubdomainPartition& p,
                          const QuadratureSpec& quad = {});

// G(u, p)(x) = DL u + SL p evaluated directly; near targets use adaptive subdivision.
// Throws domain error for points on the mesh. near_count, if given, receives the number
// of points closer than half the minimum panel length.
CVec eval_potential(const WaveNumber& k, const CurveMesh& mesh, const TraceVec& density,
                    const std::vector<Point>& points, int* near_count = nullptr);

// Gradient of G(u, p), returned as (d/dx, d/dy) per point.
std::vector<std::array<cplx, 2>> eval_potential_gradient(const WaveNumber& k, const CurveMesh& mesh,
                                                         const TraceVec& density,
                                                         const std::vector<Point>& points);

struct JumpReport {
  double residual = 0.0;      // relative, both components
  double dir_residual = 0.0;  // relative Dirichlet part
  double neu_residual = 0.0;  // relative Neumann part
};

// Interior minus exterior traces of G(density) at panel midpoints, obtained by linear
// extrapolation of potential values at distances delta and 2 delta along the normal.
// delta <= 0 picks 0.5 h^2 per panel (h = panel length).
JumpReport jump_test(const WaveNumber& k, const CurveMesh& mesh, const TraceVec& density, double delta = 0.0);

}  // namespace hmt
