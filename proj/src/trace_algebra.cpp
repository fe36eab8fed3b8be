#include "hmt/trace_algebra.hpp"

#include <cmath>

namespace hmt {

TraceVec TraceVec::zero(const CurveMesh& m) {
  return {CVec::Zero(m.num_vertices()), CVec::Zero(m.num_panels())};
}

CVec TraceVec::stacked() const {
  CVec x(dir.size() + neu.size());
  x << dir, neu;
  return x;
}

TraceVec TraceVec::from_stacked(const CurveMesh& m, const CVec& x) {
  if (x.size() != m.num_vertices() + m.num_panels()) throw Error(ErrorKind::size_mismatch, "trace vector size");
  return {x.head(m.num_vertices()), x.tail(m.num_panels())};
}

RMat mixed_mass(const CurveMesh& m) {
  RMat b = RMat::Zero(m.num_panels(), m.num_vertices());
  for (int k = 0; k < m.num_panels(); ++k) {
    const double h = m.length(k);
    b(k, m.panels[k][0]) += 0.5 * h;
    b(k, m.panels[k][1]) += 0.5 * h;
  }
  return b;
}

RMat p1_mass(const CurveMesh& m) {
  RMat a = RMat::Zero(m.num_vertices(), m.num_vertices());
  for (int k = 0; k < m.num_panels(); ++k) {
    const double h = m.length(k);
    const int i = m.panels[k][0], j = m.panels[k][1];
    a(i, i) += h / 3.0;
    a(j, j) += h / 3.0;
    a(i, j) += h / 6.0;
    a(j, i) += h / 6.0;
  }
  return a;
}

RMat p1_stiffness(const CurveMesh& m) {
  RMat a = RMat::Zero(m.num_vertices(), m.num_vertices());
  for (int k = 0; k < m.num_panels(); ++k) {
    const double h = m.length(k);
    const int i = m.panels[k][0], j = m.panels[k][1];
    a(i, i) += 1.0 / h;
    a(j, j) += 1.0 / h;
    a(i, j) -= 1.0 / h;
    a(j, i) -= 1.0 / h;
  }
  return a;
}

RVec panel_lengths(const CurveMesh& m) {
  RVec h(m.num_panels());
  for (int k = 0; k < m.num_panels(); ++k) h(k) = m.length(k);
  return h;
}

namespace {

void check_sizes(const CurveMesh& m, const TraceVec& a) {
  if (a.dir.size() != m.num_vertices() || a.neu.size() != m.num_panels())
    throw Error(ErrorKind::size_mismatch, "trace vector does not match its mesh");
}

}  // namespace

cplx dual_pairing(const CurveMesh& m, const CVec& v, const CVec& q) {
  if (v.size() != m.num_vertices() || q.size() != m.num_panels())
    throw Error(ErrorKind::size_mismatch, "dual pairing sizes");
  cplx s = 0.0;
  for (int k = 0; k < m.num_panels(); ++k)
    s += q(k) * (0.5 * m.length(k)) * (v(m.panels[k][0]) + v(m.panels[k][1]));
  return s;
}

cplx pairing_local(const CurveMesh& m, const TraceVec& a, const TraceVec& b) {
  check_sizes(m, a);
  check_sizes(m, b);
  return dual_pairing(m, a.dir, b.neu) - dual_pairing(m, b.dir, a.neu);
}

TraceVec theta(const TraceVec& a) { return {-a.dir, a.neu}; }

MultiTraceVec theta(const MultiTraceVec& a) {
  MultiTraceVec r;
  for (const auto& t : a.parts) r.parts.push_back(theta(t));
  return r;
}

DoubleHatVec theta(const DoubleHatVec& a) {
  DoubleHatVec r;
  for (const auto& t : a.parts) r.parts.push_back(theta(t));
  r.sigma = theta(a.sigma);
  return r;
}

cplx pairing_gamma(const SubdomainPartition& p, const MultiTraceVec& a, const MultiTraceVec& b) {
  if (static_cast<int>(a.parts.size()) != p.n + 1 || static_cast<int>(b.parts.size()) != p.n + 1)
    throw Error(ErrorKind::size_mismatch, "multi-trace component count");
  cplx s = 0.0;
  for (int j = 0; j <= p.n; ++j) s += pairing_local(p.gamma[j].curve, a.parts[j], b.parts[j]);
  return s;
}

cplx pairing_doublehat(const SubdomainPartition& p, const DoubleHatVec& a, const DoubleHatVec& b) {
  if (static_cast<int>(a.parts.size()) != p.n || static_cast<int>(b.parts.size()) != p.n)
    throw Error(ErrorKind::size_mismatch, "double-hat component count");
  cplx s = pairing_local(p.sigma.curve, a.sigma, b.sigma);
  for (int j = 1; j <= p.n; ++j) s += pairing_local(p.gamma[j].curve, a.parts[j - 1], b.parts[j - 1]);
  return s;
}

RMat trace_gram(const CurveMesh& m) {
  const int nv = m.num_vertices(), np = m.num_panels();
  RMat g = RMat::Zero(nv + np, nv + np);
  g.topLeftCorner(nv, nv) = p1_mass(m) + p1_stiffness(m);
  for (int k = 0; k < np; ++k) g(nv + k, nv + k) = m.length(k);
  return g;
}

double trace_norm(const CurveMesh& m, const TraceVec& a) {
  check_sizes(m, a);
  const CVec x = a.stacked();
  const double v = (x.adjoint() * trace_gram(m).cast<cplx>() * x)(0, 0).real();
  return std::sqrt(std::max(v, 0.0));
}

double multi_trace_norm(const SubdomainPartition& p, const MultiTraceVec& a) {
  double s = 0.0;
  for (int j = 0; j <= p.n; ++j) {
    const double t = trace_norm(p.gamma[j].curve, a.parts[j]);
    s += t * t;
  }
  return std::sqrt(s);
}

RMat theta_pairing_matrix(const CurveMesh& m) {
  const int nv = m.num_vertices(), np = m.num_panels();
  const RMat b = mixed_mass(m);
  RMat t = RMat::Zero(nv + np, nv + np);
  t.topRightCorner(nv, np) = b.transpose();
  t.bottomLeftCorner(np, nv) = b;
  return t;
}

RMat skew_pairing_matrix(const CurveMesh& m) {
  // [a, b] = q_b^T B u_a - p_a^T B v_b ; rows (v_b, q_b), cols (u_a, p_a)
  const int nv = m.num_vertices(), np = m.num_panels();
  const RMat b = mixed_mass(m);
  RMat t = RMat::Zero(nv + np, nv + np);
  t.topRightCorner(nv, np) = -b.transpose();
  t.bottomLeftCorner(np, nv) = b;
  return t;
}

SingleTraceDofMap::SingleTraceDofMap(const SubdomainPartition& p)
    : p_(&p),
      num_dir_(static_cast<int>(p.skeleton_vertices.size())),
      num_neu_(static_cast<int>(p.skeleton_panels.size())) {
  offsets_.push_back(0);
  for (int j = 0; j <= p.n; ++j)
    offsets_.push_back(offsets_.back() + p.gamma[j].curve.num_vertices() + p.gamma[j].curve.num_panels());
  embedding_ = RMat::Zero(offsets_.back(), size());
  for (int j = 0; j <= p.n; ++j) {
    const BoundaryMesh& b = p.gamma[j];
    const int o = offsets_[j], nv = b.curve.num_vertices();
    for (int v = 0; v < nv; ++v) embedding_(o + v, b.skel_vertex[v]) = 1.0;
    for (int k = 0; k < b.curve.num_panels(); ++k) embedding_(o + nv + k, num_dir_ + b.skel_panel[k]) = b.sign[k];
  }
  const BoundaryMesh& s = p.sigma;
  const int nvs = s.curve.num_vertices();
  tr_ = RMat::Zero(nvs + s.curve.num_panels(), size());
  for (int v = 0; v < nvs; ++v) tr_(v, s.skel_vertex[v]) = 1.0;
  // n_Sigma = -n_j on a Sigma panel, so the Sigma orientation sign applies directly
  for (int k = 0; k < s.curve.num_panels(); ++k) tr_(nvs + k, num_dir_ + s.skel_panel[k]) = s.sign[k];
}

CVec stack(const SubdomainPartition& p, const MultiTraceVec& m) {
  if (static_cast<int>(m.parts.size()) != p.n + 1) throw Error(ErrorKind::size_mismatch, "multi-trace component count");
  Eigen::Index total = 0;
  for (const auto& t : m.parts) total += t.size();
  CVec x(total);
  Eigen::Index o = 0;
  for (int j = 0; j <= p.n; ++j) {
    const TraceVec& t = m.parts[j];
    if (t.dir.size() != p.gamma[j].curve.num_vertices() || t.neu.size() != p.gamma[j].curve.num_panels())
      throw Error(ErrorKind::size_mismatch, "multi-trace component size");
    x.segment(o, t.size()) = t.stacked();
    o += t.size();
  }
  return x;
}

MultiTraceVec unstack(const SubdomainPartition& p, const CVec& x) {
  MultiTraceVec m;
  Eigen::Index o = 0;
  for (int j = 0; j <= p.n; ++j) {
    const CurveMesh& c = p.gamma[j].curve;
    const int sz = c.num_vertices() + c.num_panels();
    if (o + sz > x.size()) throw Error(ErrorKind::size_mismatch, "stacked multi-trace too short");
    m.parts.push_back(TraceVec::from_stacked(c, x.segment(o, sz)));
    o += sz;
  }
  if (o != x.size()) throw Error(ErrorKind::size_mismatch, "stacked multi-trace too long");
  return m;
}

MultiTraceVec SingleTraceDofMap::embed(const CVec& free) const {
  if (free.size() != size()) throw Error(ErrorKind::size_mismatch, "free vector size");
  return unstack(*p_, embedding_.cast<cplx>() * free);
}

TraceVec SingleTraceDofMap::trace_sigma_free(const CVec& free) const {
  if (free.size() != size()) throw Error(ErrorKind::size_mismatch, "free vector size");
  return TraceVec::from_stacked(p_->sigma.curve, tr_.cast<cplx>() * free);
}

CVec SingleTraceDofMap::restrict_to_free(const MultiTraceVec& m) const {
  const CVec x = stack(*p_, m);
  CVec free = CVec::Zero(size());
  std::vector<bool> seen(size(), false);
  for (Eigen::Index r = 0; r < embedding_.rows(); ++r) {
    for (Eigen::Index c = 0; c < embedding_.cols(); ++c) {
      const double e = embedding_(r, c);
      if (e != 0.0 && !seen[c]) {
        free(c) = x(r) / e;
        seen[c] = true;
      }
    }
  }
  const double resid = (embedding_.cast<cplx>() * free - x).norm();
  if (resid > 1e-12 * std::max(1.0, x.norm()))
    throw Error(ErrorKind::not_single_trace,
                "input is not a single-trace vector (constraint residual " + std::to_string(resid) + ")");
  return free;
}

TraceVec trace_sigma(const SingleTraceDofMap& map, const MultiTraceVec& m) {
  return map.trace_sigma_free(map.restrict_to_free(m));
}

}  // namespace hmt
