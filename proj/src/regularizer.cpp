#include "hmt/regularizer.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace hmt {

RegularizerM::RegularizerM(const CurveMesh& sigma) {
  if (!sigma.closed) throw Error(ErrorKind::mesh, "regularizer needs a closed Sigma curve");
  sys_ = p1_stiffness(sigma) + p1_mass(sigma);
  b_ = mixed_mass(sigma);
  Eigen::LLT<RMat> llt(sys_);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::singular, "S + Mm is not positive definite");
  m_ = kI * llt.solve(RMat(b_.transpose())).cast<cplx>();
}

CVec RegularizerM::apply(const CVec& p0) const {
  if (p0.size() != num_neu()) throw Error(ErrorKind::size_mismatch, "regularizer: input size");
  return m_ * p0;
}

RegularizerM assemble_M(const CurveMesh& sigma) { return RegularizerM(sigma); }

CVec apply_M_star(const RegularizerM& m, const CVec& p0) {
  if (p0.size() != m.num_neu()) throw Error(ErrorKind::size_mismatch, "regularizer adjoint: input size");
  const CMat bm = m.mixed().cast<cplx>() * m.matrix();  // q -> B M q, tested against p
  const CVec rhs = bm.transpose() * p0;
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(m.mixed().cast<cplx>());
  cod.setThreshold(1e-12);
  return cod.solve(rhs);
}

ExtensionMap::ExtensionMap(const SubdomainPartition& p) {
  const BoundaryMesh& s = p.sigma;
  e_ = RMat::Zero(static_cast<Eigen::Index>(p.skeleton_vertices.size()), s.curve.num_vertices());
  for (int v = 0; v < s.curve.num_vertices(); ++v) e_(s.skel_vertex[v], v) = 1.0;
}

CVec ExtensionMap::apply(const CVec& sigma_dir) const {
  if (sigma_dir.size() != e_.cols()) throw Error(ErrorKind::size_mismatch, "extension: input size");
  return e_.cast<cplx>() * sigma_dir;
}

CMat assemble_C(const SubdomainPartition& p, const SingleTraceDofMap& map, const RegularizerM& m,
                const ExtensionMap& ext) {
  const int total = map.multi_trace_size();
  const BoundaryMesh& s = p.sigma;
  const int ns = s.curve.num_panels();
  // Tr_nu read from the Neumann trace of the region across each Sigma panel
  RMat tr_nu = RMat::Zero(ns, total);
  for (int k = 0; k < ns; ++k) {
    const int sp = s.skel_panel[k];
    const SkeletonPanel& pan = p.skeleton_panels[sp];
    const int j = pan.owner_left == p.sigma_index() ? pan.owner_right : pan.owner_left;
    const BoundaryMesh& b = p.gamma.at(j);
    int local = -1;
    for (int l = 0; l < b.curve.num_panels(); ++l)
      if (b.skel_panel[l] == sp) local = l;
    if (local < 0) throw Error(ErrorKind::mesh, "Sigma panel missing from its neighbor boundary");
    tr_nu(k, map.offset(j) + b.curve.num_vertices() + local) = s.sign[k] * b.sign[local];
  }
  // per-region Dirichlet restriction of skeleton Dirichlet values
  RMat restrict = RMat::Zero(total, static_cast<Eigen::Index>(p.skeleton_vertices.size()));
  for (int j = 0; j <= p.n; ++j) {
    const BoundaryMesh& b = p.gamma[j];
    for (int v = 0; v < b.curve.num_vertices(); ++v) restrict(map.offset(j) + v, b.skel_vertex[v]) = 1.0;
  }
  return restrict.cast<cplx>() * (ext.matrix().cast<cplx>() * (m.matrix() * tr_nu.cast<cplx>()));
}

CMat assemble_C_free(const SingleTraceDofMap& map, const RegularizerM& m, const ExtensionMap& ext) {
  const int nd = map.num_dir();
  // Neumann rows of the Sigma trace matrix act on free coefficients
  const RMat tr_nu = map.trace_sigma_matrix().bottomRows(m.num_neu());
  CMat c = CMat::Zero(map.size(), map.size());
  c.topRows(nd) = ext.matrix().cast<cplx>() * (m.matrix() * tr_nu.cast<cplx>());
  return c;
}

}  // namespace hmt
