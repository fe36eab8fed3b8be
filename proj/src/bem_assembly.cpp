#include <algorithm>
#include <cmath>
#include <string>

#include "hmt/bem.hpp"
#include "hmt/parallel.hpp"
#include "hmt/quadrature.hpp"

namespace hmt {

void QuadratureSpec::validate() const {
  if (gauss_order < 2 || gauss_order > 16) throw Error(ErrorKind::config, "gauss_order must lie in [2, 16]");
  if (far_order < 2 || far_order > 16) throw Error(ErrorKind::config, "far_order must lie in [2, 16]");
  if (graded_levels < 1 || graded_levels > 30) throw Error(ErrorKind::config, "graded_levels must lie in [1, 30]");
  if (near_levels < 0 || near_levels > 10) throw Error(ErrorKind::config, "near_levels must lie in [0, 10]");
  if (!(near_threshold >= 0.0) || !(far_threshold >= near_threshold))
    throw Error(ErrorKind::config, "need 0 <= near_threshold <= far_threshold");
}

namespace {

struct Panel {
  Point a, b;
  double h;
  Point n;
};

Panel panel_of(const CurveMesh& m, int k) { return {m.start(k), m.end(k), m.length(k), m.normal(k)}; }

Point at(const Panel& p, double t) { return p.a + t * (p.b - p.a); }

// All integrals include the Jacobian h_x h_y.
struct PairIntegrals {
  cplx g[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // G phi_a(x) phi_b(y)
  cplx dl[2] = {0.0, 0.0};                  // n_y . grad G(x - y) phi_b(y)
  cplx adl[2] = {0.0, 0.0};                 // n_x . grad G(x - y) phi_a(x)

  cplx g_sum() const { return g[0][0] + g[0][1] + g[1][0] + g[1][1]; }
};

inline void add_point(const WaveNumber& k, const Panel& x_p, const Panel& y_p, double t, double s, double w,
                      bool remainder_only, PairIntegrals& out) {
  const Point x = at(x_p, t), y = at(y_p, s);
  const Point d = x - y;
  const double r = norm(d);
  if (!(r > 0.0)) return;  // measure-zero node hit
  const RadialKernel rk = radial_kernel(k, r);
  const double jw = w * x_p.h * y_p.h;
  const cplx g = remainder_only ? rk.g + std::log(r) / (2.0 * kPi) : rk.g;
  const double pa[2] = {1.0 - t, t};
  const double pb[2] = {1.0 - s, s};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out.g[a][b] += jw * g * (pa[a] * pb[b]);
  if (remainder_only) return;
  const cplx fy = jw * rk.dg * (dot(y_p.n, d) / r);
  const cplx fx = jw * rk.dg * (dot(x_p.n, d) / r);
  for (int b = 0; b < 2; ++b) out.dl[b] += fy * pb[b];
  for (int a = 0; a < 2; ++a) out.adl[a] += fx * pa[a];
}

void tensor_gauss(const WaveNumber& k, const Panel& x_p, const Panel& y_p, double t0, double t1, double s0,
                  double s1, int order, PairIntegrals& out) {
  const GaussRule& q = gauss_legendre(order);
  const double lt = t1 - t0, ls = s1 - s0;
  for (int i = 0; i < order; ++i) {
    const double t = t0 + lt * q.nodes[i];
    for (int j = 0; j < order; ++j) {
      const double s = s0 + ls * q.nodes[j];
      add_point(k, x_p, y_p, t, s, q.weights[i] * q.weights[j] * lt * ls, false, out);
    }
  }
}

double segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double l2 = dot(d, d);
  double t = l2 > 0.0 ? dot(p - a, d) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * d));
}

double segments_distance(Point a0, Point a1, Point b0, Point b1) {
  // non-intersecting segments: distance attained at an endpoint
  return std::min({segment_distance(a0, b0, b1), segment_distance(a1, b0, b1), segment_distance(b0, a0, a1),
                   segment_distance(b1, a0, a1)});
}

void near_recursive(const WaveNumber& k, const Panel& x_p, const Panel& y_p, double t0, double t1, double s0,
                    double s1, int level, const QuadratureSpec& q, PairIntegrals& out) {
  const Point xa = at(x_p, t0), xb = at(x_p, t1), ya = at(y_p, s0), yb = at(y_p, s1);
  const double len = std::max((t1 - t0) * x_p.h, (s1 - s0) * y_p.h);
  const double dist = segments_distance(xa, xb, ya, yb);
  if (dist < q.near_threshold * len && level < q.near_levels) {
    const double tm = 0.5 * (t0 + t1), sm = 0.5 * (s0 + s1);
    near_recursive(k, x_p, y_p, t0, tm, s0, sm, level + 1, q, out);
    near_recursive(k, x_p, y_p, t0, tm, sm, s1, level + 1, q, out);
    near_recursive(k, x_p, y_p, tm, t1, s0, sm, level + 1, q, out);
    near_recursive(k, x_p, y_p, tm, t1, sm, s1, level + 1, q, out);
    return;
  }
  tensor_gauss(k, x_p, y_p, t0, t1, s0, s1, q.gauss_order, out);
}

// Breakpoints 0, 2^-L, ..., 1/2, 1.
std::vector<double> graded_breaks(int levels) {
  std::vector<double> b{0.0};
  for (int l = levels; l >= 1; --l) b.push_back(std::ldexp(1.0, -l));
  b.push_back(1.0);
  return b;
}

// Panels sharing one vertex; tc/sc tell which end (0 = start, 1 = end) is shared.
void adjacent_rule(const WaveNumber& k, const Panel& x_p, const Panel& y_p, int tc, int sc, const QuadratureSpec& q,
                   PairIntegrals& out) {
  const GaussRule& g = gauss_legendre(q.gauss_order);
  const auto breaks = graded_breaks(q.graded_levels);
  auto map_t = [tc](double u) { return tc == 0 ? u : 1.0 - u; };
  auto map_s = [sc](double u) { return sc == 0 ? u : 1.0 - u; };
  for (std::size_t iv = 0; iv + 1 < breaks.size(); ++iv) {
    const double r0 = breaks[iv], r1 = breaks[iv + 1];
    for (int i = 0; i < q.gauss_order; ++i) {
      const double rho = r0 + (r1 - r0) * g.nodes[i];
      const double wr = g.weights[i] * (r1 - r0) * rho;
      for (int j = 0; j < q.gauss_order; ++j) {
        const double w = g.nodes[j];
        const double ww = wr * g.weights[j];
        add_point(k, x_p, y_p, map_t(rho), map_s(rho * w), ww, false, out);
        add_point(k, x_p, y_p, map_t(rho * w), map_s(rho), ww, false, out);
      }
    }
  }
}

// Identical panels with the same orientation. The double-layer terms vanish on flat panels.
void self_rule(const WaveNumber& k, const Panel& p, const QuadratureSpec& q, PairIntegrals& out) {
  const GaussRule& g = gauss_legendre(q.gauss_order);
  const auto breaks = graded_breaks(q.self_panel_rule == SelfPanelRule::graded_subdivision ? q.graded_levels + 8 : 2);
  const bool split = q.self_panel_rule == SelfPanelRule::log_split_analytic;
  // integral over the unit square written as u = |t - s| in [0,1], s in [0, 1-u], both orderings
  for (std::size_t iv = 0; iv + 1 < breaks.size(); ++iv) {
    const double u0 = breaks[iv], u1 = breaks[iv + 1];
    for (int i = 0; i < q.gauss_order; ++i) {
      const double u = u0 + (u1 - u0) * g.nodes[i];
      const double wu = g.weights[i] * (u1 - u0);
      const double len = 1.0 - u;
      for (int j = 0; j < q.gauss_order; ++j) {
        const double s = len * g.nodes[j];
        const double w = wu * len * g.weights[j];
        add_point(k, p, p, s + u, s, w, split, out);
        add_point(k, p, p, s, s + u, w, split, out);
      }
    }
  }
  if (split) {
    // -(1/2pi) ln(h |t - s|) against phi_a(t) phi_b(s): ln h / 4 + L_ab
    static constexpr double kLogMoments[2][2] = {{-7.0 / 16.0, -5.0 / 16.0}, {-5.0 / 16.0, -7.0 / 16.0}};
    const double h2 = p.h * p.h;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        out.g[a][b] += -h2 / (2.0 * kPi) * (0.25 * std::log(p.h) + kLogMoments[a][b]);
  }
  out.dl[0] = out.dl[1] = out.adl[0] = out.adl[1] = 0.0;
}

bool same_point(Point a, Point b, double scale) { return norm(a - b) <= 1e-12 * scale; }

enum class PairKind { identical, reversed, adjacent, near, far };

struct Classified {
  PairKind kind;
  int tc = 0, sc = 0;
};

Classified classify(const Panel& x, const Panel& y, const QuadratureSpec& q) {
  const double scale = std::max(x.h, y.h);
  const bool aa = same_point(x.a, y.a, scale), bb = same_point(x.b, y.b, scale);
  const bool ab = same_point(x.a, y.b, scale), ba = same_point(x.b, y.a, scale);
  if (aa && bb) return {PairKind::identical};
  if (ab && ba) return {PairKind::reversed};
  if (aa) return {PairKind::adjacent, 0, 0};
  if (ab) return {PairKind::adjacent, 0, 1};
  if (ba) return {PairKind::adjacent, 1, 0};
  if (bb) return {PairKind::adjacent, 1, 1};
  const double dist = segments_distance(x.a, x.b, y.a, y.b);
  if (dist >= q.far_threshold * scale) return {PairKind::far};
  return {PairKind::near};
}

PairIntegrals integrate_pair(const WaveNumber& k, const Panel& x, const Panel& y, const QuadratureSpec& q) {
  PairIntegrals out;
  const Classified c = classify(x, y, q);
  switch (c.kind) {
    case PairKind::identical: self_rule(k, x, q, out); break;
    case PairKind::reversed: {
      PairIntegrals same;
      self_rule(k, x, q, same);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out.g[a][b] = same.g[a][1 - b];
      break;
    }
    case PairKind::adjacent: adjacent_rule(k, x, y, c.tc, c.sc, q, out); break;
    case PairKind::near: near_recursive(k, x, y, 0.0, 1.0, 0.0, 1.0, 0, q, out); break;
    case PairKind::far: tensor_gauss(k, x, y, 0.0, 1.0, 0.0, 1.0, q.far_order, out); break;
  }
  auto bad = [](cplx z) { return !std::isfinite(z.real()) || !std::isfinite(z.imag()); };
  for (int a = 0; a < 2; ++a) {
    if (bad(out.dl[a]) || bad(out.adl[a])) throw Error(ErrorKind::quadrature, "non-finite panel integral");
    for (int b = 0; b < 2; ++b)
      if (bad(out.g[a][b])) throw Error(ErrorKind::quadrature, "non-finite panel integral");
  }
  return out;
}

CMat bilinear_from_blocks(const CMat& V, const CMat& K, const CMat& Kp, const CMat& W) {
  const Eigen::Index nv = W.rows(), np = V.rows();
  const Eigen::Index mv = W.cols(), mp = V.cols();
  CMat t(nv + np, mv + mp);
  t.topLeftCorner(nv, mv) = W;
  t.topRightCorner(nv, mp) = Kp;
  t.bottomLeftCorner(np, mv) = K;
  t.bottomRightCorner(np, mp) = V;
  return t;
}

void require_closed(const CurveMesh& m, const char* who) {
  if (!m.closed) throw Error(ErrorKind::mesh, std::string(who) + ": mesh is not closed");
  if (m.num_panels() == 0) throw Error(ErrorKind::mesh, std::string(who) + ": empty mesh");
}

}  // namespace

OperatorBlockMatrix assemble_block(const WaveNumber& k, const CurveMesh& mesh, const QuadratureSpec& quad) {
  quad.validate();
  require_closed(mesh, "assemble_block");
  const int np = mesh.num_panels(), nv = mesh.num_vertices();
  std::vector<Panel> panels(np);
  for (int i = 0; i < np; ++i) panels[i] = panel_of(mesh, i);
  // rows of the upper triangle, computed independently and accumulated in a fixed order
  std::vector<std::vector<PairIntegrals>> rows(np);
  parallel_for(np, [&](int i) {
    rows[i].resize(np - i);
    for (int j = i; j < np; ++j) rows[i][j - i] = integrate_pair(k, panels[i], panels[j], quad);
  });
  OperatorBlockMatrix out;
  out.V = CMat::Zero(np, np);
  out.K = CMat::Zero(np, nv);
  out.Kp = CMat::Zero(nv, np);
  out.W = CMat::Zero(nv, nv);
  const double k2 = k.squared();
  for (int i = 0; i < np; ++i) {
    const double di[2] = {-1.0 / panels[i].h, 1.0 / panels[i].h};
    for (int j = i; j < np; ++j) {
      const PairIntegrals& pi = rows[i][j - i];
      const double dj[2] = {-1.0 / panels[j].h, 1.0 / panels[j].h};
      const double nn = dot(panels[i].n, panels[j].n);
      const cplx gs = pi.g_sum();
      out.V(i, j) += gs;
      if (j != i) out.V(j, i) += gs;
      for (int a = 0; a < 2; ++a) {
        const int va = mesh.panels[i][a];
        for (int b = 0; b < 2; ++b) {
          const int vb = mesh.panels[j][b];
          const cplx w = di[a] * dj[b] * gs - k2 * nn * pi.g[a][b];
          out.W(va, vb) += w;
          if (j != i) out.W(vb, va) += w;
        }
      }
      if (j == i) continue;
      for (int b = 0; b < 2; ++b) {
        const int vb = mesh.panels[j][b];
        out.K(i, vb) += pi.dl[b];
        out.Kp(vb, i) -= pi.dl[b];
      }
      for (int a = 0; a < 2; ++a) {
        const int va = mesh.panels[i][a];
        out.Kp(va, j) += pi.adl[a];
        out.K(j, va) -= pi.adl[a];
      }
    }
  }
  out.bilinear = bilinear_from_blocks(out.V, out.K, out.Kp, out.W);
  return out;
}

CrossBlock assemble_cross(const WaveNumber& k, const CurveMesh& source, const CurveMesh& target,
                          const QuadratureSpec& quad) {
  quad.validate();
  require_closed(source, "assemble_cross");
  require_closed(target, "assemble_cross");
  const int nt = target.num_panels(), ns = source.num_panels();
  std::vector<Panel> tp(nt), sp(ns);
  for (int i = 0; i < nt; ++i) tp[i] = panel_of(target, i);
  for (int j = 0; j < ns; ++j) sp[j] = panel_of(source, j);
  std::vector<std::vector<PairIntegrals>> rows(nt);
  parallel_for(nt, [&](int i) {
    rows[i].resize(ns);
    for (int j = 0; j < ns; ++j) rows[i][j] = integrate_pair(k, tp[i], sp[j], quad);
  });
  CrossBlock out;
  out.V = CMat::Zero(nt, ns);
  out.K = CMat::Zero(nt, source.num_vertices());
  out.Kp = CMat::Zero(target.num_vertices(), ns);
  out.W = CMat::Zero(target.num_vertices(), source.num_vertices());
  CMat corr_q = CMat::Zero(nt, source.num_vertices());  // rows q, cols u
  CMat corr_v = CMat::Zero(target.num_vertices(), ns);  // rows v, cols p
  const double k2 = k.squared();
  for (int i = 0; i < nt; ++i) {
    const double di[2] = {-1.0 / tp[i].h, 1.0 / tp[i].h};
    for (int j = 0; j < ns; ++j) {
      const PairIntegrals& pi = rows[i][j];
      const double dj[2] = {-1.0 / sp[j].h, 1.0 / sp[j].h};
      const double nn = dot(tp[i].n, sp[j].n);
      const cplx gs = pi.g_sum();
      out.V(i, j) += gs;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          out.W(target.panels[i][a], source.panels[j][b]) += di[a] * dj[b] * gs - k2 * nn * pi.g[a][b];
      for (int b = 0; b < 2; ++b) out.K(i, source.panels[j][b]) += pi.dl[b];
      for (int a = 0; a < 2; ++a) out.Kp(target.panels[i][a], j) += pi.adl[a];
      const Classified c = classify(tp[i], sp[j], quad);
      if (c.kind == PairKind::identical || c.kind == PairKind::reversed) {
        // exterior trace with respect to the source region: -u/2 on the Dirichlet side,
        // +p/2 on the Neumann side once measured with the target normal
        out.shared_panel_correction = true;
        const double half_h = 0.5 * tp[i].h;
        const double flip = c.kind == PairKind::reversed ? 1.0 : -1.0;
        for (int b = 0; b < 2; ++b) corr_q(i, source.panels[j][b]) -= 0.5 * half_h;
        for (int a = 0; a < 2; ++a) corr_v(target.panels[i][a], j) += flip * 0.5 * half_h;
      }
    }
  }
  out.matrix = bilinear_from_blocks(out.V, out.K + corr_q, out.Kp + corr_v, out.W);
  return out;
}

CrossBlock assemble_cross(const WaveNumber& k, int source, int target, const SubdomainPartition& p,
                          const QuadratureSpec& quad) {
  if (source == target) throw Error(ErrorKind::config, "assemble_cross: source and target coincide");
  if (source < 0 || source > p.n + 1 || target < 0 || target > p.n + 1)
    throw Error(ErrorKind::config, "assemble_cross: boundary id out of range");
  return assemble_cross(k, p.boundary(source).curve, p.boundary(target).curve, quad);
}

}  // namespace hmt
