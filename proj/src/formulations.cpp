#include "hmt/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "hmt/linalg.hpp"
#include "hmt/regularizer.hpp"
#include "hmt/trace_algebra.hpp"

namespace hmt {

const char* to_string(FormulationKind k) {
  switch (k) {
    case FormulationKind::costabel: return "costabel";
    case FormulationKind::stf: return "stf";
    case FormulationKind::cstf: return "cstf";
    case FormulationKind::mtf: return "mtf";
    case FormulationKind::cmtf: return "cmtf";
  }
  return "?";
}

FormulationKind parse_formulation(const std::string& name) {
  for (auto k : {FormulationKind::costabel, FormulationKind::stf, FormulationKind::cstf, FormulationKind::mtf,
                 FormulationKind::cmtf})
    if (name == to_string(k)) return k;
  throw Error(ErrorKind::config, "unknown formulation '" + name + "'");
}

IncidentWave IncidentWave::plane(double k0, double angle, cplx amplitude) {
  if (!(k0 > 0.0)) throw Error(ErrorKind::config, "incident wavenumber must be positive");
  return {k0, {std::cos(angle), std::sin(angle)}, amplitude};
}

cplx IncidentWave::value(Point x) const { return amplitude * std::exp(kI * (k0 * dot(direction, x))); }

cplx IncidentWave::normal_derivative(Point x, Point n) const {
  return kI * (k0 * dot(direction, n)) * value(x);
}

TraceVec incident_traces(const IncidentWave& w, const CurveMesh& mesh) {
  if (!(w.k0 > 0.0)) throw Error(ErrorKind::config, "incident wavenumber must be positive");
  TraceVec t = TraceVec::zero(mesh);
  for (int i = 0; i < mesh.num_vertices(); ++i) t.dir(i) = w.value(mesh.vertices[i]);
  const double g = 0.5 / std::sqrt(3.0);
  for (int k = 0; k < mesh.num_panels(); ++k) {
    const Point a = mesh.start(k), b = mesh.end(k), n = mesh.normal(k);
    cplx s = 0.0;
    for (double t0 : {0.5 - g, 0.5 + g}) s += 0.5 * w.normal_derivative(a + t0 * (b - a), n);
    t.neu(k) = s;
  }
  return t;
}

void Problem::validate(FormulationKind kind) const {
  if (!config) throw Error(ErrorKind::config, "problem has no configuration");
  const int n = partition().n;
  if (static_cast<int>(kappa.size()) != n + 1)
    throw Error(ErrorKind::config, "need one wavenumber per homogeneous subdomain (" + std::to_string(n + 1) + ")");
  if (kind == FormulationKind::costabel && n != 0) throw Error(ErrorKind::config, "costabel requires n=0");
  if (volume().boundary_vertex_map.size() != partition().sigma.curve.vertices.size())
    throw Error(ErrorKind::mesh, "volume mesh is not conforming with Sigma");
  if (wave.amplitude != cplx(0.0)) {
    if (!kappa[0].is_real() || std::abs(kappa[0].magnitude() - wave.k0) > 1e-14 * wave.k0)
      throw Error(ErrorKind::config, "incident wavenumber must equal the real kappa_0");
  }
  quad.validate();
}

const DofBlock& DofLayout::block(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b;
  throw Error(ErrorKind::config, "layout has no block '" + name + "'");
}

namespace {

bool single_trace(FormulationKind k) { return k == FormulationKind::stf || k == FormulationKind::cstf; }
bool multi_trace(FormulationKind k) { return k == FormulationKind::mtf || k == FormulationKind::cmtf; }

// skeleton vertex -> volume vertex (or -1)
std::vector<int> skeleton_to_volume(const SubdomainPartition& p, const VolumeMesh& v) {
  std::vector<int> out(p.skeleton_vertices.size(), -1);
  for (std::size_t i = 0; i < p.sigma.skel_vertex.size(); ++i) out[p.sigma.skel_vertex[i]] = v.boundary_vertex_map[i];
  return out;
}

// Adds sub(r, c) to m(idx[r], idx[c]).
void scatter(CMat& m, const CMat& sub, const std::vector<int>& idx) {
  for (Eigen::Index c = 0; c < sub.cols(); ++c)
    for (Eigen::Index r = 0; r < sub.rows(); ++r) m(idx[r], idx[c]) += sub(r, c);
}

void scatter(CVec& v, const CVec& sub, const std::vector<int>& idx) {
  for (Eigen::Index r = 0; r < sub.size(); ++r) v(idx[r]) += sub(r);
}

// layout index of every free single-trace coordinate
std::vector<int> free_index(const DofLayout& l, const SingleTraceDofMap& map) {
  std::vector<int> idx(map.size());
  for (int v = 0; v < map.num_dir(); ++v) idx[v] = l.skeleton_dir[v];
  for (int k = 0; k < map.num_neu(); ++k) idx[map.num_dir() + k] = l.skeleton_neu_offset + k;
  return idx;
}

// layout index of every stacked doublehat coordinate: parts j = 1..n, then Sigma (dir, neu)
std::vector<int> doublehat_index(const DofLayout& l, const SubdomainPartition& p, const VolumeMesh& vol) {
  std::vector<int> idx;
  for (int j = 1; j <= p.n; ++j) {
    const CurveMesh& c = p.gamma[j].curve;
    for (int i = 0; i < c.num_vertices() + c.num_panels(); ++i) idx.push_back(l.part_offset[j - 1] + i);
  }
  for (int v : vol.boundary_vertex_map) idx.push_back(v);
  for (int k = 0; k < p.sigma.curve.num_panels(); ++k) idx.push_back(l.p_sigma_offset + k);
  return idx;
}

std::vector<int> gamma0_index(const DofLayout& l, const SubdomainPartition& p, const VolumeMesh& vol) {
  const auto s2v = skeleton_to_volume(p, vol);
  const BoundaryMesh& g = p.gamma[0];
  std::vector<int> idx;
  for (int v : g.skel_vertex) {
    if (s2v[v] < 0) throw Error(ErrorKind::mesh, "costabel: Gamma_0 vertex not on Sigma");
    idx.push_back(s2v[v]);
  }
  for (int k = 0; k < g.curve.num_panels(); ++k) idx.push_back(l.p_sigma_offset + k);
  return idx;
}

CMat as_complex(const RMat& m) { return m.cast<cplx>(); }

}  // namespace

DofLayout make_layout(FormulationKind kind, const SubdomainPartition& p, const VolumeMesh& volume) {
  DofLayout l;
  l.kind = kind;
  const int nv = volume.num_vertices();
  l.blocks.push_back({"volume", 0, nv});
  int off = nv;
  if (kind == FormulationKind::costabel) {
    if (p.n != 0) throw Error(ErrorKind::config, "costabel requires n=0");
    const int np = p.gamma[0].curve.num_panels();
    l.blocks.push_back({"p0", off, np});
    l.p_sigma_offset = off;
    off += np;
  } else if (single_trace(kind)) {
    const auto s2v = skeleton_to_volume(p, volume);
    l.skeleton_dir.assign(p.skeleton_vertices.size(), -1);
    int count = 0;
    for (std::size_t v = 0; v < s2v.size(); ++v) {
      if (s2v[v] >= 0) {
        l.skeleton_dir[v] = s2v[v];
      } else {
        l.skeleton_dir[v] = off + count++;
      }
    }
    l.blocks.push_back({"skeleton_dir", off, count});
    off += count;
    const int nn = static_cast<int>(p.skeleton_panels.size());
    l.skeleton_neu_offset = off;
    l.blocks.push_back({"skeleton_neu", off, nn});
    off += nn;
  } else {
    for (int j = 1; j <= p.n; ++j) {
      const CurveMesh& c = p.gamma[j].curve;
      const int sz = c.num_vertices() + c.num_panels();
      l.part_offset.push_back(off);
      l.blocks.push_back({"trace_" + std::to_string(j), off, sz});
      off += sz;
    }
    const int ns = p.sigma.curve.num_panels();
    l.p_sigma_offset = off;
    l.blocks.push_back({"p_sigma", off, ns});
    off += ns;
  }
  l.size = off;
  return l;
}

DiscreteSystem assemble(FormulationKind kind, const Problem& pr) {
  pr.validate(kind);
  const SubdomainPartition& p = pr.partition();
  const VolumeMesh& vol = pr.volume();
  DiscreteSystem s;
  s.kind = kind;
  s.layout = make_layout(kind, p, vol);
  const int n = s.layout.size;
  s.matrix = CMat::Zero(n, n);
  s.rhs = CVec::Zero(n);
  const bool has_wave = pr.wave.amplitude != cplx(0.0);

  // volume part, shared by every kind
  {
    const FemBlocks fem = assemble_fem(vol, pr.medium, pr.source);
    s.matrix.topLeftCorner(vol.num_vertices(), vol.num_vertices()) += fem.a_sigma;
    s.rhs.head(vol.num_vertices()) += fem.load;
  }

  if (kind == FormulationKind::costabel) {
    const CurveMesh& g0 = p.gamma[0].curve;
    const auto idx = gamma0_index(s.layout, p, vol);
    const OperatorBlockMatrix a0 = assemble_block(pr.kappa[0], g0, pr.quad);
    // 1/2 [Tr u, Tr v]_Sigma = -1/2 [u, v]_Gamma0 for two subdomains
    scatter(s.matrix, a0.bilinear - 0.5 * as_complex(skew_pairing_matrix(g0)), idx);
    if (has_wave) scatter(s.rhs, CVec(-as_complex(theta_pairing_matrix(g0)) * incident_traces(pr.wave, g0).stacked()), idx);
    return s;
  }

  if (single_trace(kind)) {
    const SingleTraceDofMap map(p);
    const auto idx = free_index(s.layout, map);
    const int nf = map.size();
    const RMat& emb = map.embedding();
    CMat form = CMat::Zero(nf, nf);
    CMat bem_diag = CMat::Zero(map.multi_trace_size(), map.multi_trace_size());
    CMat theta_diag = CMat::Zero(map.multi_trace_size(), map.multi_trace_size());
    for (int j = 0; j <= p.n; ++j) {
      const CurveMesh& c = p.gamma[j].curve;
      const int o = map.offset(j), sz = c.num_vertices() + c.num_panels();
      bem_diag.block(o, o, sz, sz) = assemble_block(pr.kappa[j], c, pr.quad).bilinear;
      theta_diag.block(o, o, sz, sz) = as_complex(theta_pairing_matrix(c));
    }
    const CMat e = as_complex(emb);
    form += e.transpose() * bem_diag * e;
    const CMat tr = as_complex(map.trace_sigma_matrix());
    form += 0.5 * tr.transpose() * as_complex(skew_pairing_matrix(p.sigma.curve)) * tr;
    CVec rhs_inc = CVec::Zero(nf);
    if (has_wave) {
      CVec u_inc = CVec::Zero(map.multi_trace_size());
      u_inc.segment(map.offset(0), p.gamma[0].curve.num_vertices() + p.gamma[0].curve.num_panels()) =
          incident_traces(pr.wave, p.gamma[0].curve).stacked();
      rhs_inc = -(e.transpose() * (theta_diag * u_inc));
    }
    if (kind == FormulationKind::cstf) {
      const RegularizerM m(p.sigma.curve);
      const ExtensionMap ext(p);
      const CMat c = assemble_C_free(map, m, ext);
      form += c.transpose() * (e.transpose() * (bem_diag - 0.5 * theta_diag) * e);
      rhs_inc += c.transpose() * rhs_inc;
    }
    scatter(s.matrix, form, idx);
    scatter(s.rhs, rhs_inc, idx);
    return s;
  }

  // multi-trace kinds
  const auto idx = doublehat_index(s.layout, p, vol);
  // boundary ids in doublehat order: 1..n, Sigma = n+1
  std::vector<int> ids;
  for (int j = 1; j <= p.n; ++j) ids.push_back(j);
  ids.push_back(p.sigma_index());
  std::vector<int> off{0};
  for (int id : ids) {
    const CurveMesh& c = p.boundary(id).curve;
    off.push_back(off.back() + c.num_vertices() + c.num_panels());
  }
  const int nz = off.back();
  CMat z = CMat::Zero(nz, nz);
  std::vector<CMat> sigma_rows(ids.size());  // rows of the Sigma block, per source
  for (std::size_t q = 0; q < ids.size(); ++q) {
    const CurveMesh& cq = p.boundary(ids[q]).curve;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      CMat blk;
      if (q == j) {
        blk = assemble_block(pr.kappa[0], cq, pr.quad).bilinear;
        if (ids[q] != p.sigma_index()) blk += assemble_block(pr.kappa[ids[q]], cq, pr.quad).bilinear;
      } else {
        blk = assemble_cross(pr.kappa[0], ids[j], ids[q], p, pr.quad).matrix;
      }
      z.block(off[q], off[j], blk.rows(), blk.cols()) = blk;
      if (ids[q] == p.sigma_index()) sigma_rows[j] = blk;
    }
  }
  const std::size_t qs = ids.size() - 1;
  const CurveMesh& sig = p.sigma.curve;
  const int nvs = sig.num_vertices(), nps = sig.num_panels();
  z.block(off[qs], off[qs], nvs + nps, nvs + nps) += 0.5 * as_complex(skew_pairing_matrix(sig));
  CVec zr = CVec::Zero(nz);
  TraceVec inc_sigma;
  if (has_wave) {
    for (std::size_t q = 0; q < ids.size(); ++q) {
      const CurveMesh& cq = p.boundary(ids[q]).curve;
      const TraceVec g = incident_traces(pr.wave, cq);
      zr.segment(off[q], g.size()) = as_complex(theta_pairing_matrix(cq)) * g.stacked();
      if (q == qs) inc_sigma = g;
    }
  }
  if (kind == FormulationKind::cmtf) {
    // <M* gamma_N^Sigma G(w), q> = <M q, gamma_N^Sigma G(w)>: the Neumann trace tested with P1
    // functions sits in the v-rows of each Sigma-row block; the Sigma self block needs the
    // interior trace, i.e. (A + Id/2).
    const RegularizerM m(sig);
    const CMat mt = m.matrix().transpose();  // P0 x P1
    for (std::size_t j = 0; j < ids.size(); ++j) {
      CMat neu_rows = sigma_rows[j].topRows(nvs);
      if (j == qs) neu_rows += 0.5 * as_complex(theta_pairing_matrix(sig)).topRows(nvs);
      z.block(off[qs] + nvs, off[j], nps, neu_rows.cols()) += mt * neu_rows;
    }
    if (has_wave)
      zr.segment(off[qs] + nvs, nps) += mt * (as_complex(mixed_mass(sig)).transpose() * inc_sigma.neu);
  }
  scatter(s.matrix, z, idx);
  scatter(s.rhs, zr, idx);
  return s;
}

namespace {

// H^{1/2} x H^{-1/2} equivalent Gram: hypersingular and single layer at kappa = i.
RMat boundary_gram(const CurveMesh& c, const QuadratureSpec& quad) {
  const OperatorBlockMatrix op = assemble_block(WaveNumber::imaginary(1.0), c, quad);
  const int nv = c.num_vertices(), np = c.num_panels();
  RMat g = RMat::Zero(nv + np, nv + np);
  g.topLeftCorner(nv, nv) = 0.5 * (op.W.real() + op.W.real().transpose());
  g.bottomRightCorner(np, np) = 0.5 * (op.V.real() + op.V.real().transpose());
  return g;
}

}  // namespace

RMat energy_gram(const DofLayout& layout, const Problem& pr) {
  const SubdomainPartition& p = pr.partition();
  const VolumeMesh& vol = pr.volume();
  RMat g = RMat::Zero(layout.size, layout.size);
  const int nv = vol.num_vertices();
  {
    // H1 on the volume: stiffness + mass
    const CMat stiff = assemble_a_sigma(vol, MediumField::constant(0.0));
    g.topLeftCorner(nv, nv) = stiff.real() + volume_mass(vol);
  }
  auto add = [&g](const RMat& sub, const std::vector<int>& idx) {
    for (Eigen::Index c = 0; c < sub.cols(); ++c)
      for (Eigen::Index r = 0; r < sub.rows(); ++r) g(idx[r], idx[c]) += sub(r, c);
  };
  if (layout.kind == FormulationKind::costabel) {
    const CurveMesh& g0 = p.gamma[0].curve;
    const auto idx = gamma0_index(layout, p, vol);
    add(boundary_gram(g0, pr.quad), idx);
  } else if (single_trace(layout.kind)) {
    const SingleTraceDofMap map(p);
    CurveMesh skel;
    skel.vertices = p.skeleton_vertices;
    for (const auto& sp : p.skeleton_panels) skel.panels.push_back({sp.v0, sp.v1});
    add(boundary_gram(skel, pr.quad), free_index(layout, map));
  } else {
    const auto idx = doublehat_index(layout, p, vol);
    int o = 0;
    for (int j = 1; j <= p.n; ++j) {
      const CurveMesh& c = p.gamma[j].curve;
      const int sz = c.num_vertices() + c.num_panels();
      add(boundary_gram(c, pr.quad), std::vector<int>(idx.begin() + o, idx.begin() + o + sz));
      o += sz;
    }
    add(boundary_gram(p.sigma.curve, pr.quad), std::vector<int>(idx.begin() + o, idx.end()));
  }
  return g;
}

namespace {

double sigma_max_estimate(const CMat& a) {
  const Eigen::Index n = a.cols();
  if (n == 0) return 0.0;
  CVec v = CVec::Constant(n, cplx(1.0, 0.5)).normalized();
  double est = 0.0;
  for (int it = 0; it < 60; ++it) {
    CVec w = a.adjoint() * (a * v);
    const double nrm = w.norm();
    if (!(nrm > 0.0)) return 0.0;
    const double next = std::sqrt(nrm);
    v = w / nrm;
    if (it > 3 && std::abs(next - est) <= 1e-8 * next) return next;
    est = next;
  }
  return est;
}

}  // namespace

SolutionBundle solve(const DiscreteSystem& s, const Problem& problem, const SolveOptions& opt) {
  if (s.matrix.rows() != s.matrix.cols() || s.matrix.rows() != s.rhs.size())
    throw Error(ErrorKind::size_mismatch, "solve: system is not square");
  SolutionBundle b;
  b.kind = s.kind;
  b.layout = s.layout;
  b.problem = &problem;
  b.sigma_max = sigma_max_estimate(s.matrix);
  std::optional<LuFactorization> lu;
  try {
    lu.emplace(s.matrix);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::singular)
      throw NearSingularError(std::string("near-singular (possible spurious resonance): ") + e.what(), 0.0);
    throw;
  }
  b.sigma_min = sigma_min_inverse_iteration(*lu);
  if (b.sigma_min < opt.near_singular_tol * b.sigma_max) {
    throw NearSingularError("near-singular (possible spurious resonance): sigma_min = " +
                                std::to_string(b.sigma_min),
                            b.sigma_min);
  }
  b.x = lu->solve(s.rhs);
  b.residual = relative_residual(s.matrix, b.x, s.rhs);
  return b;
}

SolutionTraces solution_traces(const SolutionBundle& b) {
  const Problem& pr = *b.problem;
  const SubdomainPartition& p = pr.partition();
  const VolumeMesh& vol = pr.volume();
  SolutionTraces t;
  t.volume = b.x.head(vol.num_vertices());
  t.parts.resize(p.n + 1);
  auto gather = [&b](const std::vector<int>& idx) {
    CVec v(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) v(i) = b.x(idx[i]);
    return v;
  };
  if (b.kind == FormulationKind::costabel) {
    t.parts[0] = TraceVec::from_stacked(p.gamma[0].curve, gather(gamma0_index(b.layout, p, vol)));
  } else if (single_trace(b.kind)) {
    const SingleTraceDofMap map(p);
    const MultiTraceVec m = map.embed(gather(free_index(b.layout, map)));
    t.parts = m.parts;
  } else {
    CVec z = gather(doublehat_index(b.layout, p, vol));
    Eigen::Index o = 0;
    for (int j = 1; j <= p.n; ++j) {
      const CurveMesh& c = p.gamma[j].curve;
      const int sz = c.num_vertices() + c.num_panels();
      t.parts[j] = TraceVec::from_stacked(c, z.segment(o, sz));
      o += sz;
    }
    t.sigma = TraceVec::from_stacked(p.sigma.curve, z.segment(o, z.size() - o));
  }
  return t;
}

CVec reconstruct(const SolutionBundle& b, const std::vector<Point>& points) {
  const Problem& pr = *b.problem;
  const SubdomainPartition& p = pr.partition();
  const SolutionTraces t = solution_traces(b);
  const int np = static_cast<int>(points.size());
  CVec out = CVec::Zero(np);
  std::map<int, std::vector<int>> by_region;
  for (int i = 0; i < np; ++i) {
    const int r = p.locate(points[i]);
    if (r != p.sigma_index()) {
      // distance to the nearest panel against that panel's length
      double best = std::numeric_limits<double>::infinity(), h = 0.0;
      for (const auto& sp : p.skeleton_panels) {
        const Point a = p.skeleton_vertices[sp.v0], c = p.skeleton_vertices[sp.v1];
        const Point d = c - a;
        const double tt = std::clamp(dot(points[i] - a, d) / dot(d, d), 0.0, 1.0);
        const double dist = norm(points[i] - (a + tt * d));
        if (dist < best) {
          best = dist;
          h = norm(d);
        }
      }
      if (best <= 0.5 * h) throw Error(ErrorKind::domain, "point too close to an interface");
    }
    by_region[r].push_back(i);
  }
  const bool mt = multi_trace(b.kind);
  for (const auto& [r, ids] : by_region) {
    std::vector<Point> pts;
    for (int i : ids) pts.push_back(points[i]);
    CVec val = CVec::Zero(static_cast<Eigen::Index>(pts.size()));
    if (r == p.sigma_index()) {
      for (std::size_t i = 0; i < pts.size(); ++i) val(i) = interpolate_p1(pr.volume(), t.volume, pts[i]);
    } else if (r == 0) {
      for (std::size_t i = 0; i < pts.size(); ++i) val(i) = pr.wave.value(pts[i]);
      if (mt) {
        val -= eval_potential(pr.kappa[0], p.sigma.curve, t.sigma, pts);
        for (int j = 1; j <= p.n; ++j) val -= eval_potential(pr.kappa[0], p.gamma[j].curve, t.parts[j], pts);
      } else {
        val += eval_potential(pr.kappa[0], p.gamma[0].curve, t.parts[0], pts);
      }
    } else {
      val = eval_potential(pr.kappa[r], p.gamma[r].curve, t.parts[r], pts);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) out(ids[i]) = val(i);
  }
  return out;
}

}  // namespace hmt
