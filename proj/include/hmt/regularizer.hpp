#pragma once

#include "hmt/common.hpp"
#include "hmt/geometry.hpp"
#include "hmt/trace_algebra.hpp"

namespace hmt {

// M = i (S + Mm)^{-1} B^T on the Sigma P1 space: P0 coefficients in, P1 coefficients out.
class RegularizerM {
 public:
  explicit RegularizerM(const CurveMesh& sigma);

  CVec apply(const CVec& p0) const;
  // Dense P1 x P0 matrix of apply.
  const CMat& matrix() const { return m_; }
  const RMat& system() const { return sys_; }
  const RMat& mixed() const { return b_; }
  int num_dir() const { return static_cast<int>(b_.cols()); }
  int num_neu() const { return static_cast<int>(b_.rows()); }

 private:
  RMat sys_;
  RMat b_;
  CMat m_;
};

RegularizerM assemble_M(const CurveMesh& sigma);

// Solves <M* p, q> = <M q, p> for every q, i.e. B M* = (B M)^T, in the minimum-norm sense.
CVec apply_M_star(const RegularizerM& m, const CVec& p0);

// Sigma P1 coefficients -> skeleton Dirichlet DOFs, copying at Sigma vertices and zero elsewhere.
class ExtensionMap {
 public:
  explicit ExtensionMap(const SubdomainPartition& p);
  CVec apply(const CVec& sigma_dir) const;
  const RMat& matrix() const { return e_; }

 private:
  RMat e_;
};

// C(v) = (gamma_dir^j E M Tr_nu(v), 0)_j on stacked multi-trace coefficients.
CMat assemble_C(const SubdomainPartition& p, const SingleTraceDofMap& map, const RegularizerM& m,
                const ExtensionMap& ext);
// The same operator on single-trace free coefficients (dir skeleton vertices, then neu skeleton panels).
CMat assemble_C_free(const SingleTraceDofMap& map, const RegularizerM& m, const ExtensionMap& ext);

}  // namespace hmt
