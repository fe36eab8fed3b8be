#include <algorithm>
#include <cmath>

#include "hmt/bem.hpp"
#include "hmt/parallel.hpp"
#include "hmt/quadrature.hpp"

namespace hmt {

namespace {

constexpr int kPotentialOrder = 8;
constexpr int kMaxDepth = 60;

double point_segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double l2 = dot(d, d);
  const double t = l2 > 0.0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * d));
}

struct PanelData {
  Point a, b, n;
  double h;
  cplx u0, u1, p;
};

// Accumulates value and gradient of DL u + SL p over [t0, t1] of one panel.
template <bool WithGradient>
void integrate_panel(const WaveNumber& k, Point x, const PanelData& d, double t0, double t1, int depth,
                     cplx& val, cplx& gx, cplx& gy) {
  const Point s0 = d.a + t0 * (d.b - d.a), s1 = d.a + t1 * (d.b - d.a);
  const double len = (t1 - t0) * d.h;
  if (point_segment_distance(x, s0, s1) < len && depth < kMaxDepth) {
    const double tm = 0.5 * (t0 + t1);
    integrate_panel<WithGradient>(k, x, d, t0, tm, depth + 1, val, gx, gy);
    integrate_panel<WithGradient>(k, x, d, tm, t1, depth + 1, val, gx, gy);
    return;
  }
  const GaussRule& q = gauss_legendre(kPotentialOrder);
  const double k2 = k.squared();
  for (int i = 0; i < kPotentialOrder; ++i) {
    const double t = t0 + (t1 - t0) * q.nodes[i];
    const double w = q.weights[i] * len;
    const Point y = d.a + t * (d.b - d.a);
    const Point r_vec = x - y;
    const double r = norm(r_vec);
    if (!(r > 0.0)) throw Error(ErrorKind::domain, "potential evaluated on the boundary");
    const RadialKernel rk = radial_kernel(k, r);
    const cplx u = (1.0 - t) * d.u0 + t * d.u1;
    const double nd = dot(d.n, r_vec);
    val += w * (rk.dg * (nd / r) * u + rk.g * d.p);
    if constexpr (WithGradient) {
      // grad of g(r) p and of f(r) (n . d) u with f = g'/r
      const cplx f = rk.dg / r;
      const cplx g2 = -k2 * rk.g - rk.dg / r;
      const cplx fp = (g2 - f) / r;
      const cplx radial = (rk.dg / r) * d.p + (nd * fp / r) * u;
      gx += w * (radial * r_vec.x + f * u * d.n.x);
      gy += w * (radial * r_vec.y + f * u * d.n.y);
    }
  }
}

std::vector<PanelData> panel_data(const CurveMesh& mesh, const TraceVec& density) {
  if (density.dir.size() != mesh.num_vertices() || density.neu.size() != mesh.num_panels())
    throw Error(ErrorKind::size_mismatch, "potential: density does not match the mesh");
  std::vector<PanelData> out(mesh.num_panels());
  for (int k = 0; k < mesh.num_panels(); ++k)
    out[k] = {mesh.start(k), mesh.end(k), mesh.normal(k), mesh.length(k), density.dir(mesh.panels[k][0]),
              density.dir(mesh.panels[k][1]), density.neu(k)};
  return out;
}

void check_off_mesh(const std::vector<PanelData>& panels, Point x, double scale) {
  for (const PanelData& d : panels)
    if (point_segment_distance(x, d.a, d.b) <= 1e-13 * scale)
      throw Error(ErrorKind::domain, "potential evaluated on the boundary");
}

}  // namespace

CVec eval_potential(const WaveNumber& k, const CurveMesh& mesh, const TraceVec& density,
                    const std::vector<Point>& points, int* near_count) {
  const auto panels = panel_data(mesh, density);
  const double hmin = mesh.num_panels() ? mesh.min_panel_length() : 1.0;
  const double hmax = mesh.num_panels() ? mesh.max_panel_length() : 1.0;
  const int np = static_cast<int>(points.size());
  CVec out(np);
  std::vector<char> near(np, 0);
  parallel_for(np, [&](int i) {
    check_off_mesh(panels, points[i], hmax);
    cplx val = 0.0, gx = 0.0, gy = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (const PanelData& d : panels) {
      dmin = std::min(dmin, point_segment_distance(points[i], d.a, d.b));
      integrate_panel<false>(k, points[i], d, 0.0, 1.0, 0, val, gx, gy);
    }
    near[i] = dmin < 0.5 * hmin;
    out(i) = val;
  });
  if (near_count) *near_count = static_cast<int>(std::count(near.begin(), near.end(), 1));
  return out;
}

std::vector<std::array<cplx, 2>> eval_potential_gradient(const WaveNumber& k, const CurveMesh& mesh,
                                                         const TraceVec& density,
                                                         const std::vector<Point>& points) {
  const auto panels = panel_data(mesh, density);
  const double hmax = mesh.num_panels() ? mesh.max_panel_length() : 1.0;
  std::vector<std::array<cplx, 2>> out(points.size());
  parallel_for(static_cast<int>(points.size()), [&](int i) {
    check_off_mesh(panels, points[i], hmax);
    cplx val = 0.0, gx = 0.0, gy = 0.0;
    for (const PanelData& d : panels) integrate_panel<true>(k, points[i], d, 0.0, 1.0, 0, val, gx, gy);
    out[i] = {gx, gy};
  });
  return out;
}

JumpReport jump_test(const WaveNumber& k, const CurveMesh& mesh, const TraceVec& density, double delta) {
  const int np = mesh.num_panels();
  std::vector<Point> pts;
  pts.reserve(4 * np);
  std::vector<double> dl(np);
  // order per panel: -d, -2d (interior), +d, +2d
  for (int i = 0; i < np; ++i) {
    const double h = mesh.length(i);
    dl[i] = delta > 0.0 ? delta : 0.5 * h * h;
    const Point m = mesh.midpoint(i), n = mesh.normal(i);
    for (double s : {-1.0, -2.0, 1.0, 2.0}) pts.push_back(m + (s * dl[i]) * n);
  }
  const CVec val = eval_potential(k, mesh, density, pts);
  const auto grad = eval_potential_gradient(k, mesh, density, pts);
  double ed = 0.0, en = 0.0, nd = 0.0, nn = 0.0;
  for (int i = 0; i < np; ++i) {
    const Point n = mesh.normal(i);
    auto dn = [&](int j) { return grad[j][0] * n.x + grad[j][1] * n.y; };
    const int b = 4 * i;
    const cplx dir_in = 2.0 * val(b) - val(b + 1), dir_out = 2.0 * val(b + 2) - val(b + 3);
    const cplx neu_in = 2.0 * dn(b) - dn(b + 1), neu_out = 2.0 * dn(b + 2) - dn(b + 3);
    const cplx u_mid = 0.5 * (density.dir(mesh.panels[i][0]) + density.dir(mesh.panels[i][1]));
    const cplx p = density.neu(i);
    const double h = mesh.length(i);
    ed += h * std::norm(dir_in - dir_out - u_mid);
    en += h * std::norm(neu_in - neu_out - p);
    nd += h * std::norm(u_mid);
    nn += h * std::norm(p);
  }
  JumpReport r;
  r.dir_residual = nd > 0.0 ? std::sqrt(ed / nd) : std::sqrt(ed);
  r.neu_residual = nn > 0.0 ? std::sqrt(en / nn) : std::sqrt(en);
  r.residual = (nd + nn) > 0.0 ? std::sqrt((ed + en) / (nd + nn)) : std::sqrt(ed + en);
  return r;
}

}  // namespace hmt
