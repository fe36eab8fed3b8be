#pragma once

#include <vector>

#include "hmt/common.hpp"
#include "hmt/geometry.hpp"

namespace hmt {

// Dirichlet P1 coefficients (one per vertex) and Neumann P0 coefficients (one per panel).
struct TraceVec {
  CVec dir;
  CVec neu;

  static TraceVec zero(const CurveMesh& m);
  int size() const { return static_cast<int>(dir.size() + neu.size()); }
  // Stacked (dir, neu).
  CVec stacked() const;
  static TraceVec from_stacked(const CurveMesh& m, const CVec& x);
};

// Components j = 0..n.
struct MultiTraceVec {
  std::vector<TraceVec> parts;
};

// Components j = 1..n plus the Sigma Neumann trace.
struct HatMultiTraceVec {
  std::vector<TraceVec> parts;
  CVec p_sigma;
};

// Components j = 1..n plus a full Sigma trace.
struct DoubleHatVec {
  std::vector<TraceVec> parts;
  TraceVec sigma;
};

// Mixed P0 x P1 mass: B(k, i) = integral over panel k of the hat function of vertex i.
RMat mixed_mass(const CurveMesh& m);
RMat p1_mass(const CurveMesh& m);
RMat p1_stiffness(const CurveMesh& m);
RVec panel_lengths(const CurveMesh& m);

// <v, q> = q^T B v (bilinear).
cplx dual_pairing(const CurveMesh& m, const CVec& v_dir, const CVec& q_neu);

// [a, b] = <u_a, q_b> - <p_a, v_b>.
cplx pairing_local(const CurveMesh& m, const TraceVec& a, const TraceVec& b);

TraceVec theta(const TraceVec& a);
MultiTraceVec theta(const MultiTraceVec& a);
DoubleHatVec theta(const DoubleHatVec& a);

cplx pairing_gamma(const SubdomainPartition& p, const MultiTraceVec& a, const MultiTraceVec& b);
cplx pairing_doublehat(const SubdomainPartition& p, const DoubleHatVec& a, const DoubleHatVec& b);

// Gram matrix of the surrogate trace norm: blockdiag(P1 mass + stiffness, diag(panel lengths)).
RMat trace_gram(const CurveMesh& m);
double trace_norm(const CurveMesh& m, const TraceVec& a);
double multi_trace_norm(const SubdomainPartition& p, const MultiTraceVec& a);

// Matrix of (a, b) -> [a, theta(b)] in stacked (dir, neu) coordinates: rows test, cols trial.
// Entries: rows v / cols p = B^T, rows q / cols u = B.
RMat theta_pairing_matrix(const CurveMesh& m);
// Matrix of (a, b) -> [a, b]; rows test, cols trial.
RMat skew_pairing_matrix(const CurveMesh& m);

// One Dirichlet DOF per skeleton vertex, one oriented Neumann DOF per skeleton panel.
class SingleTraceDofMap {
 public:
  explicit SingleTraceDofMap(const SubdomainPartition& p);

  int num_dir() const { return num_dir_; }
  int num_neu() const { return num_neu_; }
  int size() const { return num_dir_ + num_neu_; }
  // Offset of component j (0..n) in the stacked multi-trace vector.
  int offset(int j) const { return offsets_.at(j); }
  int multi_trace_size() const { return offsets_.back(); }
  const SubdomainPartition& partition() const { return *p_; }

  MultiTraceVec embed(const CVec& free) const;
  // Dense embedding matrix (stacked multi-trace) x (free).
  const RMat& embedding() const { return embedding_; }
  // Sigma trace of a free vector and its matrix (stacked Sigma trace) x (free).
  TraceVec trace_sigma_free(const CVec& free) const;
  const RMat& trace_sigma_matrix() const { return tr_; }
  // Recovers free coefficients, throwing not_single_trace when the constraint residual exceeds 1e-12.
  CVec restrict_to_free(const MultiTraceVec& m) const;

 private:
  const SubdomainPartition* p_;
  int num_dir_ = 0;
  int num_neu_ = 0;
  std::vector<int> offsets_;
  RMat embedding_;
  RMat tr_;
};

CVec stack(const SubdomainPartition& p, const MultiTraceVec& m);
MultiTraceVec unstack(const SubdomainPartition& p, const CVec& x);

TraceVec trace_sigma(const SingleTraceDofMap& map, const MultiTraceVec& m);

}  // namespace hmt
