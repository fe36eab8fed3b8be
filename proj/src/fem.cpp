#include "hmt/fem.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hmt/linalg.hpp"

namespace hmt {

MediumField MediumField::constant(double kappa) {
  if (!std::isfinite(kappa) || kappa < 0.0) throw Error(ErrorKind::config, "kappa_sigma must be >= 0");
  return {Kind::constant, [kappa](Point) { return kappa; }};
}

MediumField MediumField::radial(std::function<double(double)> profile) {
  return {Kind::radial_profile, [profile = std::move(profile)](Point p) { return profile(norm(p)); }};
}

MediumField MediumField::table(std::vector<Point> points, std::vector<double> values) {
  if (points.empty() || points.size() != values.size())
    throw Error(ErrorKind::config, "medium table needs matching, non-empty point and value lists");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::config, "medium table has a negative kappa");
  return {Kind::table, [points = std::move(points), values = std::move(values)](Point p) {
            std::size_t best = 0;
            double d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < points.size(); ++i) {
              const double di = norm(points[i] - p);
              if (di < d) {
                d = di;
                best = i;
              }
            }
            return values[best];
          }};
}

MediumField MediumField::table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open medium table " + path);
  std::vector<Point> pts;
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, y, k;
    if (!(ls >> x >> y >> k)) throw Error(ErrorKind::io, "bad medium table line: " + line);
    pts.push_back({x, y});
    vals.push_back(k);
  }
  return table(std::move(pts), std::move(vals));
}

namespace {

struct Element {
  std::array<int, 3> v;
  std::array<Point, 3> p;
  double area;
  std::array<Point, 3> grad;  // barycentric gradients
};

Element element(const VolumeMesh& mesh, int t) {
  Element e;
  e.v = mesh.triangles[t];
  for (int i = 0; i < 3; ++i) e.p[i] = mesh.vertices[e.v[i]];
  const double det = cross(e.p[1] - e.p[0], e.p[2] - e.p[0]);
  e.area = 0.5 * det;
  const double scale = std::max({norm(e.p[1] - e.p[0]), norm(e.p[2] - e.p[1]), norm(e.p[0] - e.p[2])});
  if (!(e.area > 1e-14 * scale * scale))
    throw Error(ErrorKind::mesh, "degenerate triangle " + std::to_string(t));
  for (int i = 0; i < 3; ++i) {
    const Point a = e.p[(i + 1) % 3], b = e.p[(i + 2) % 3];
    // gradient of lambda_i is the inward edge normal over twice the area
    const Point d = b - a;
    e.grad[i] = (1.0 / det) * Point{-d.y, d.x};
  }
  return e;
}

// Edge midpoints with barycentric coordinates; exact for quadratics.
constexpr double kMid[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};

Point bary_point(const Element& e, const double* l) { return l[0] * e.p[0] + l[1] * e.p[1] + l[2] * e.p[2]; }

}  // namespace

CMat assemble_a_sigma(const VolumeMesh& mesh, const MediumField& medium) {
  const int nv = mesh.num_vertices();
  CMat a = CMat::Zero(nv, nv);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e = element(mesh, t);
    double k2[3];
    for (int q = 0; q < 3; ++q) {
      const double k = medium(bary_point(e, kMid[q]));
      k2[q] = k * k;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double m = 0.0;
        for (int q = 0; q < 3; ++q) m += k2[q] * kMid[q][i] * kMid[q][j];
        m *= e.area / 3.0;
        a(e.v[i], e.v[j]) += e.area * dot(e.grad[i], e.grad[j]) - m;
      }
  }
  return a;
}

CVec assemble_load(const VolumeMesh& mesh, const SourceField& source) {
  CVec f = CVec::Zero(mesh.num_vertices());
  if (!source.evaluator) return f;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e = element(mesh, t);
    for (int q = 0; q < 3; ++q) {
      const cplx s = source(bary_point(e, kMid[q]));
      for (int i = 0; i < 3; ++i) f(e.v[i]) += e.area / 3.0 * s * kMid[q][i];
    }
  }
  return f;
}

std::vector<int> trace_dirichlet(const VolumeMesh& mesh) {
  if (mesh.boundary_vertex_map.empty()) throw Error(ErrorKind::mesh, "volume mesh has no boundary vertex map");
  for (int v : mesh.boundary_vertex_map)
    if (v < 0 || v >= mesh.num_vertices()) throw Error(ErrorKind::mesh, "boundary vertex map out of range");
  return mesh.boundary_vertex_map;
}

FemBlocks assemble_fem(const VolumeMesh& mesh, const MediumField& medium, const SourceField& source) {
  return {assemble_a_sigma(mesh, medium), assemble_load(mesh, source), trace_dirichlet(mesh)};
}

RMat volume_mass(const VolumeMesh& mesh) {
  RMat m = RMat::Zero(mesh.num_vertices(), mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e = element(mesh, t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(e.v[i], e.v[j]) += e.area / 12.0 * (i == j ? 2.0 : 1.0);
  }
  return m;
}

CVec solve_interior_dirichlet(const VolumeMesh& mesh, const MediumField& medium, const SourceField& source,
                              const CVec& boundary_values) {
  const auto tr = trace_dirichlet(mesh);
  if (boundary_values.size() != static_cast<Eigen::Index>(tr.size()))
    throw Error(ErrorKind::size_mismatch, "boundary values do not match the Sigma vertices");
  const int nv = mesh.num_vertices();
  const CMat a = assemble_a_sigma(mesh, medium);
  CVec rhs = assemble_load(mesh, source);
  CVec u = CVec::Zero(nv);
  std::vector<int> free_id(nv, 0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    u(tr[i]) = boundary_values(i);
    free_id[tr[i]] = -1;
  }
  std::vector<int> free;
  for (int v = 0; v < nv; ++v)
    if (free_id[v] == 0) {
      free_id[v] = static_cast<int>(free.size());
      free.push_back(v);
    }
  rhs -= a * u;
  const int nf = static_cast<int>(free.size());
  CMat af(nf, nf);
  CVec bf(nf);
  for (int i = 0; i < nf; ++i) {
    bf(i) = rhs(free[i]);
    for (int j = 0; j < nf; ++j) af(i, j) = a(free[i], free[j]);
  }
  const CVec x = lu_solve(af, bf);
  for (int i = 0; i < nf; ++i) u(free[i]) = x(i);
  return u;
}

namespace {

// Degree-5 seven-point rule on the reference triangle (barycentric, weights sum to 1).
struct TriRule {
  double l[7][3];
  double w[7];
};

const TriRule& seven_point() {
  static const TriRule r = [] {
    TriRule t{};
    const double a1 = 0.059715871789770, b1 = 0.470142064105115;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456;
    const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
    const double pts[7][3] = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                              {a2, b2, b2},                {b2, a2, b2}, {b2, b2, a2}};
    const double ws[7] = {w0, w1, w1, w1, w2, w2, w2};
    for (int i = 0; i < 7; ++i) {
      for (int j = 0; j < 3; ++j) t.l[i][j] = pts[i][j];
      t.w[i] = ws[i];
    }
    return t;
  }();
  return r;
}

}  // namespace

double l2_error(const VolumeMesh& mesh, const CVec& values, const std::function<cplx(Point)>& exact) {
  if (values.size() != mesh.num_vertices()) throw Error(ErrorKind::size_mismatch, "l2_error: field size");
  const TriRule& r = seven_point();
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e = element(mesh, t);
    for (int q = 0; q < 7; ++q) {
      const cplx uh = r.l[q][0] * values(e.v[0]) + r.l[q][1] * values(e.v[1]) + r.l[q][2] * values(e.v[2]);
      s += e.area * r.w[q] * std::norm(uh - exact(bary_point(e, r.l[q])));
    }
  }
  return std::sqrt(s);
}

double l2_norm(const VolumeMesh& mesh, const std::function<cplx(Point)>& f) {
  return l2_error(mesh, CVec::Zero(mesh.num_vertices()), f);
}

int find_triangle(const VolumeMesh& mesh, Point p) {
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    const double det = cross(b - a, c - a);
    const double l1 = cross(p - a, c - a) / det, l2 = cross(b - a, p - a) / det;
    const double tol = 1e-12;
    if (l1 >= -tol && l2 >= -tol && l1 + l2 <= 1.0 + tol) return t;
  }
  return -1;
}

cplx interpolate_p1(const VolumeMesh& mesh, const CVec& values, Point p) {
  const int t = find_triangle(mesh, p);
  if (t < 0) throw Error(ErrorKind::domain, "point outside the volume mesh");
  const auto& tri = mesh.triangles[t];
  const Point a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
  const double det = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / det, l2 = cross(b - a, p - a) / det;
  return (1.0 - l1 - l2) * values(tri[0]) + l1 * values(tri[1]) + l2 * values(tri[2]);
}

}  // namespace hmt
