#include "hmt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace hmt {

Point CurveMesh::tangent(int k) const {
  const Point d = end(k) - start(k);
  const double l = norm(d);
  return {d.x / l, d.y / l};
}

double CurveMesh::min_panel_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < num_panels(); ++k) m = std::min(m, length(k));
  return m;
}

double CurveMesh::max_panel_length() const {
  double m = 0.0;
  for (int k = 0; k < num_panels(); ++k) m = std::max(m, length(k));
  return m;
}

double CurveMesh::total_length() const {
  double s = 0.0;
  for (int k = 0; k < num_panels(); ++k) s += length(k);
  return s;
}

double CurveMesh::signed_area() const {
  double s = 0.0;
  for (int k = 0; k < num_panels(); ++k) s += cross(start(k), end(k));
  return s;
}

CurveMesh make_circle_mesh(double radius, int n_panels, Point center) {
  if (n_panels < 3) throw Error(ErrorKind::mesh, "circle mesh needs at least 3 panels");
  CurveMesh m;
  m.vertices.resize(n_panels);
  m.panels.resize(n_panels);
  for (int i = 0; i < n_panels; ++i) {
    const double t = 2.0 * kPi * i / n_panels;
    m.vertices[i] = {center.x + radius * std::cos(t), center.y + radius * std::sin(t)};
    m.panels[i] = {i, (i + 1) % n_panels};
  }
  return m;
}

Point SubdomainPartition::stored_normal(int k) const {
  const SkeletonPanel& sp = skeleton_panels[k];
  const Point d = skeleton_vertices[sp.v1] - skeleton_vertices[sp.v0];
  const double l = norm(d);
  return right_normal({d.x / l, d.y / l});
}

namespace {

double winding(const CurveMesh& c, Point p) {
  double w = 0.0;
  for (int k = 0; k < c.num_panels(); ++k) {
    const Point a = c.start(k) - p, b = c.end(k) - p;
    w += std::atan2(cross(a, b), dot(a, b));
  }
  return w / (2.0 * kPi);
}

double segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double l2 = dot(d, d);
  double t = l2 > 0.0 ? dot(p - a, d) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * d));
}

}  // namespace

int SubdomainPartition::locate(Point p) const {
  for (int r = 1; r <= n + 1; ++r) {
    if (std::lround(winding(boundary(r).curve, p)) == 1) return r;
  }
  return 0;
}

double SubdomainPartition::distance_to_skeleton(Point p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& sp : skeleton_panels)
    d = std::min(d, segment_distance(p, skeleton_vertices[sp.v0], skeleton_vertices[sp.v1]));
  return d;
}

double VolumeMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * cross(vertices[tr[1]] - vertices[tr[0]], vertices[tr[2]] - vertices[tr[0]]);
}

double VolumeMesh::area() const {
  double s = 0.0;
  for (int t = 0; t < num_triangles(); ++t) s += triangle_area(t);
  return s;
}

double VolumeMesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& tr : triangles)
    for (int e = 0; e < 3; ++e) m = std::max(m, norm(vertices[tr[(e + 1) % 3]] - vertices[tr[e]]));
  return m;
}

SubdomainPartition build_partition(int n, std::vector<Point> vertices, std::vector<SkeletonPanel> panels,
                                   std::string name) {
  SubdomainPartition p;
  p.n = n;
  p.name = std::move(name);
  p.skeleton_vertices = std::move(vertices);
  p.skeleton_panels = std::move(panels);
  p.gamma.resize(n + 1);
  for (int r = 0; r <= n + 1; ++r) {
    // oriented copies of the panels region r owns, region on the left
    struct Oriented {
      int from, to, skel, sign;
    };
    std::vector<Oriented> own;
    for (int k = 0; k < static_cast<int>(p.skeleton_panels.size()); ++k) {
      const SkeletonPanel& sp = p.skeleton_panels[k];
      if (sp.owner_left == r) own.push_back({sp.v0, sp.v1, k, +1});
      if (sp.owner_right == r) own.push_back({sp.v1, sp.v0, k, -1});
    }
    if (own.empty()) throw Error(ErrorKind::mesh, "region " + std::to_string(r) + " owns no panels");
    std::map<int, int> outgoing;
    for (int i = 0; i < static_cast<int>(own.size()); ++i) {
      if (!outgoing.emplace(own[i].from, i).second)
        throw Error(ErrorKind::mesh, "region " + std::to_string(r) + " boundary touches itself at a vertex");
    }
    BoundaryMesh& bm = p.boundary(r);
    std::vector<bool> used(own.size(), false);
    bool closed = true;
    for (int seed = 0; seed < static_cast<int>(own.size()); ++seed) {
      if (used[seed]) continue;
      const int base = static_cast<int>(bm.curve.vertices.size());
      std::vector<int> chain;
      int cur = seed;
      while (cur >= 0 && !used[cur]) {
        used[cur] = true;
        chain.push_back(cur);
        auto it = outgoing.find(own[cur].to);
        cur = it == outgoing.end() ? -1 : it->second;
      }
      if (cur != seed) closed = false;
      const int len = static_cast<int>(chain.size());
      for (int i = 0; i < len; ++i) {
        const Oriented& o = own[chain[i]];
        bm.curve.vertices.push_back(p.skeleton_vertices[o.from]);
        bm.skel_vertex.push_back(o.from);
        bm.skel_panel.push_back(o.skel);
        bm.sign.push_back(o.sign);
        bm.curve.panels.push_back({base + i, base + (i + 1) % len});
      }
    }
    bm.curve.closed = closed;
  }
  return p;
}

void reverse_orientation(BoundaryMesh& b) {
  for (auto& pn : b.curve.panels) std::swap(pn[0], pn[1]);
  for (int& s : b.sign) s = -s;
}

std::vector<std::string> validate_partition(const SubdomainPartition& p) {
  std::vector<std::string> out;
  const int nreg = p.num_regions();
  std::vector<int> appearances(p.skeleton_panels.size(), 0);
  for (int k = 0; k < static_cast<int>(p.skeleton_panels.size()); ++k) {
    const SkeletonPanel& sp = p.skeleton_panels[k];
    if (sp.owner_left < 0 || sp.owner_left >= nreg || sp.owner_right < 0 || sp.owner_right >= nreg) {
      out.push_back("panel " + std::to_string(k) + " has an owner outside 0..n+1");
      continue;
    }
    if (sp.owner_left == sp.owner_right) {
      out.push_back("panel " + std::to_string(k) + " owned twice by region " + std::to_string(sp.owner_left));
      continue;
    }
    if (sp.owner_left > sp.owner_right)
      out.push_back("panel " + std::to_string(k) + " stored normal is not that of the lower-indexed region");
    if (norm(p.skeleton_vertices[sp.v1] - p.skeleton_vertices[sp.v0]) <= 0.0)
      out.push_back("panel " + std::to_string(k) + " has zero length");
  }
  for (int r = 0; r < nreg; ++r) {
    const BoundaryMesh& b = p.boundary(r);
    const std::string tag = r == p.sigma_index() ? "Sigma" : "region " + std::to_string(r);
    if (!b.curve.closed) out.push_back(tag + ": boundary is not closed");
    const int np = b.curve.num_panels();
    if (static_cast<int>(b.skel_panel.size()) != np || static_cast<int>(b.sign.size()) != np) {
      out.push_back(tag + ": panel map size mismatch");
      continue;
    }
    bool inward = false;
    for (int k = 0; k < np; ++k) {
      const int s = b.skel_panel[k];
      if (s < 0 || s >= static_cast<int>(p.skeleton_panels.size())) {
        out.push_back(tag + ": panel map points outside the skeleton");
        continue;
      }
      ++appearances[s];
      const SkeletonPanel& sp = p.skeleton_panels[s];
      if (sp.owner_left != r && sp.owner_right != r)
        out.push_back(tag + ": local panel " + std::to_string(k) + " maps to a panel it does not own");
      const Point ln = b.curve.normal(k);
      const Point sn = p.stored_normal(s);
      const double agree = dot(ln, sn);
      if ((agree > 0.0 ? 1 : -1) != b.sign[k])
        out.push_back(tag + ": orientation sign of local panel " + std::to_string(k) + " is inconsistent");
      // the region must see its own outward normal
      const int expected = sp.owner_left == r ? 1 : -1;
      if ((agree > 0.0 ? 1 : -1) != expected) inward = true;
    }
    const double area2 = b.curve.signed_area();
    const bool ok_area = r == 0 ? area2 < 0.0 : area2 > 0.0;
    if (!ok_area || inward) out.push_back(tag + ": normal points inward");
  }
  for (int k = 0; k < static_cast<int>(appearances.size()); ++k)
    if (appearances[k] != 2)
      out.push_back("panel " + std::to_string(k) + " appears in " + std::to_string(appearances[k]) +
                    " region boundaries");
  // every Sigma panel pairs Sigma with one homogeneous subdomain
  for (int k = 0; k < static_cast<int>(p.skeleton_panels.size()); ++k) {
    const SkeletonPanel& sp = p.skeleton_panels[k];
    if (sp.owner_left == p.sigma_index() && sp.owner_right == p.sigma_index())
      out.push_back("panel " + std::to_string(k) + " pairs Sigma with itself");
  }
  return out;
}

std::vector<Point> cross_points(const SubdomainPartition& p) {
  std::vector<std::set<int>> regions(p.skeleton_vertices.size());
  for (const auto& sp : p.skeleton_panels) {
    for (int v : {sp.v0, sp.v1}) {
      regions[v].insert(sp.owner_left);
      regions[v].insert(sp.owner_right);
    }
  }
  std::vector<Point> out;
  for (std::size_t v = 0; v < regions.size(); ++v)
    if (regions[v].size() >= 3) out.push_back(p.skeleton_vertices[v]);
  return out;
}

namespace {

// Appends panels along a vertex chain. `left` is the region on the left of the
// chain direction, `right` the one on the right.
void add_chain(std::vector<SkeletonPanel>& panels, const std::vector<int>& chain, bool closed, int left,
               int right) {
  const int m = static_cast<int>(chain.size());
  const int count = closed ? m : m - 1;
  for (int i = 0; i < count; ++i) {
    const int a = chain[i], b = chain[(i + 1) % m];
    if (left < right)
      panels.push_back({a, b, left, right});
    else
      panels.push_back({b, a, right, left});
  }
}

std::vector<int> add_circle_vertices(std::vector<Point>& v, double r, int n) {
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    ids[i] = static_cast<int>(v.size());
    v.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return ids;
}

double default_volume_h(const BoundaryMesh& sigma, double volume_h) {
  return volume_h > 0.0 ? volume_h : sigma.curve.max_panel_length();
}

}  // namespace

Configuration make_concentric_config(double a, double b, int n_inner, int n_outer, double volume_h) {
  if (!(a > 0.0) || !(b > a)) throw Error(ErrorKind::config, "concentric config needs 0 < a < b");
  if (n_inner < 16 || n_outer < 16 || n_inner % 2 || n_outer % 2)
    throw Error(ErrorKind::config, "concentric config needs even panel counts >= 16");
  std::vector<Point> v;
  const auto inner = add_circle_vertices(v, a, n_inner);
  const auto outer = add_circle_vertices(v, b, n_outer);
  std::vector<SkeletonPanel> panels;
  add_chain(panels, inner, true, 2, 1);
  add_chain(panels, outer, true, 1, 0);
  Configuration c;
  c.partition = build_partition(1, std::move(v), std::move(panels), "concentric");
  c.volume = triangulate_disk(c.partition.sigma.curve, default_volume_h(c.partition.sigma, volume_h));
  return c;
}

Configuration make_halfdisk_config(double a, double b, int n_arc, double volume_h) {
  if (!(a > 0.0) || !(b > a)) throw Error(ErrorKind::config, "halfdisk config needs 0 < a < b");
  if (n_arc < 8 || n_arc % 2) throw Error(ErrorKind::config, "halfdisk config needs an even n_arc >= 8");
  std::vector<Point> v;
  const auto sig = add_circle_vertices(v, a, n_arc);
  const int half = n_arc / 2;
  std::vector<int> upper_sigma(sig.begin(), sig.begin() + half + 1);
  std::vector<int> lower_sigma(sig.begin() + half, sig.end());
  lower_sigma.push_back(sig[0]);
  std::vector<int> outer_arc(half + 1);
  for (int i = 0; i <= half; ++i) {
    const double t = kPi * i / half;
    outer_arc[i] = static_cast<int>(v.size());
    v.push_back({b * std::cos(t), b * std::sin(t)});
  }
  const double h = 2.0 * kPi * a / n_arc;
  const int m = std::max(1, static_cast<int>(std::lround((b - a) / h)));
  std::vector<int> right_seg{sig[0]}, left_seg{outer_arc[half]};
  for (int s = 1; s < m; ++s) {
    right_seg.push_back(static_cast<int>(v.size()));
    v.push_back({a + (b - a) * s / m, 0.0});
  }
  right_seg.push_back(outer_arc[0]);
  for (int s = 1; s < m; ++s) {
    left_seg.push_back(static_cast<int>(v.size()));
    v.push_back({-b + (b - a) * s / m, 0.0});
  }
  left_seg.push_back(sig[half]);
  std::vector<SkeletonPanel> panels;
  add_chain(panels, upper_sigma, false, 2, 1);
  add_chain(panels, lower_sigma, false, 2, 0);
  add_chain(panels, outer_arc, false, 1, 0);
  add_chain(panels, right_seg, false, 1, 0);
  add_chain(panels, left_seg, false, 1, 0);
  Configuration c;
  c.partition = build_partition(1, std::move(v), std::move(panels), "halfdisk");
  c.volume = triangulate_disk(c.partition.sigma.curve, default_volume_h(c.partition.sigma, volume_h));
  return c;
}

Configuration make_gap_demo_config(double a, double b, double c, int n_panels, double volume_h) {
  if (!(a > 0.0) || !(b > a) || !(c > b)) throw Error(ErrorKind::config, "gap demo needs 0 < a < b < c");
  auto even = [](double x) {
    int k = static_cast<int>(std::lround(x));
    return std::max(16, k + k % 2);
  };
  std::vector<Point> v;
  const auto ca = add_circle_vertices(v, a, std::max(16, n_panels + n_panels % 2));
  const auto cb = add_circle_vertices(v, b, even(n_panels * b / a));
  const auto cc = add_circle_vertices(v, c, even(n_panels * c / a));
  std::vector<SkeletonPanel> panels;
  add_chain(panels, ca, true, 2, 0);
  add_chain(panels, cb, true, 0, 1);
  add_chain(panels, cc, true, 1, 0);
  Configuration cfg;
  cfg.partition = build_partition(1, std::move(v), std::move(panels), "gap-demo");
  cfg.volume = triangulate_disk(cfg.partition.sigma.curve, default_volume_h(cfg.partition.sigma, volume_h));
  return cfg;
}

Configuration make_disk_config(double a, int n_panels, double volume_h) {
  if (!(a > 0.0)) throw Error(ErrorKind::config, "disk config needs a > 0");
  if (n_panels < 8) throw Error(ErrorKind::config, "disk config needs at least 8 panels");
  std::vector<Point> v;
  const auto ids = add_circle_vertices(v, a, n_panels);
  std::vector<SkeletonPanel> panels;
  add_chain(panels, ids, true, 1, 0);
  Configuration c;
  c.partition = build_partition(0, std::move(v), std::move(panels), "disk");
  c.volume = triangulate_disk(c.partition.sigma.curve, default_volume_h(c.partition.sigma, volume_h));
  return c;
}

Configuration make_external_config(VolumeMesh volume) {
  const auto& map = volume.boundary_vertex_map;
  if (map.size() < 3) throw Error(ErrorKind::mesh, "external mesh needs a boundary loop of at least 3 vertices");
  for (int i : map)
    if (i < 0 || i >= volume.num_vertices()) throw Error(ErrorKind::mesh, "external mesh boundary map out of range");
  std::vector<Point> v;
  for (int i : map) v.push_back(volume.vertices[i]);
  double area2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) area2 += cross(v[i], v[(i + 1) % v.size()]);
  std::vector<int> ids(v.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  if (area2 < 0.0) std::reverse(ids.begin(), ids.end());
  std::vector<SkeletonPanel> panels;
  add_chain(panels, ids, true, 1, 0);
  Configuration c;
  c.partition = build_partition(0, v, std::move(panels), "external-mesh");
  // re-index the map to the Sigma curve numbering chosen by the partition builder
  const CurveMesh& sc = c.partition.sigma.curve;
  std::vector<int> remap(sc.num_vertices(), -1);
  for (int k = 0; k < sc.num_vertices(); ++k)
    for (std::size_t i = 0; i < v.size(); ++i)
      if (sc.vertices[k].x == v[i].x && sc.vertices[k].y == v[i].y) remap[k] = map[i];
  for (int r : remap)
    if (r < 0) throw Error(ErrorKind::mesh, "external mesh boundary does not match its Sigma curve");
  volume.boundary_vertex_map = remap;
  for (int t = 0; t < volume.num_triangles(); ++t)
    if (!(volume.triangle_area(t) > 0.0)) throw Error(ErrorKind::mesh, "external mesh has a non-positive triangle");
  c.volume = std::move(volume);
  return c;
}

namespace {

// Distance from c along direction (cos t, sin t) to the polygon.
double ray_polygon(const CurveMesh& sigma, Point c, double t) {
  const Point d{std::cos(t), std::sin(t)};
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < sigma.num_panels(); ++k) {
    const Point a = sigma.start(k) - c, b = sigma.end(k) - c;
    const Point e = b - a;
    const double den = cross(d, e);
    if (std::abs(den) < 1e-300) continue;
    const double s = cross(a, e) / den;   // distance along ray
    const double u = cross(a, d) / den;   // position on the segment
    if (s > 0.0 && u >= -1e-12 && u <= 1.0 + 1e-12) best = std::min(best, s);
  }
  return best;
}

}  // namespace

VolumeMesh triangulate_disk(const CurveMesh& sigma, double target_h) {
  if (!sigma.closed) throw Error(ErrorKind::mesh, "triangulate_disk needs a closed curve");
  if (!(target_h > 0.0)) throw Error(ErrorKind::mesh, "triangulate_disk needs target_h > 0");
  const int nb = sigma.num_vertices();
  if (nb != sigma.num_panels()) throw Error(ErrorKind::mesh, "triangulate_disk needs a single closed cycle");
  // vertex order along the panels, starting at vertex 0
  std::vector<int> order(nb);
  {
    std::vector<int> next(nb, -1);
    for (const auto& pn : sigma.panels) next[pn[0]] = pn[1];
    int cur = 0;
    for (int i = 0; i < nb; ++i) {
      order[i] = cur;
      cur = next[cur];
      if (cur < 0) throw Error(ErrorKind::mesh, "triangulate_disk: broken cycle");
    }
    if (cur != 0) throw Error(ErrorKind::mesh, "triangulate_disk needs a single closed cycle");
  }
  if (sigma.signed_area() <= 0.0) throw Error(ErrorKind::mesh, "triangulate_disk needs a counter-clockwise curve");
  Point c{0.0, 0.0};
  for (const Point& p : sigma.vertices) c = c + p;
  c = (1.0 / nb) * c;
  double rmax = 0.0;
  for (const Point& p : sigma.vertices) rmax = std::max(rmax, norm(p - c));
  const int rings = std::max(1, static_cast<int>(std::ceil(rmax / target_h - 1e-9)));

  // unwrapped boundary angles
  std::vector<double> bang(nb);
  {
    const Point p0 = sigma.vertices[order[0]] - c;
    const double t0 = std::atan2(p0.y, p0.x);
    double prev = t0;
    bang[0] = t0;
    for (int i = 1; i < nb; ++i) {
      const Point p = sigma.vertices[order[i]] - c;
      double t = std::atan2(p.y, p.x);
      while (t < prev) t += 2.0 * kPi;
      while (t - prev > 2.0 * kPi) t -= 2.0 * kPi;
      bang[i] = t;
      prev = t;
    }
  }
  const double t0 = bang[0];

  VolumeMesh vm;
  vm.vertices.push_back(c);
  struct Ring {
    std::vector<int> ids;
    std::vector<double> ang;
  };
  std::vector<Ring> ring_list;
  for (int k = 1; k < rings; ++k) {
    const double frac = static_cast<double>(k) / rings;
    const double r = frac * rmax;
    int m = std::max(6, static_cast<int>(std::ceil(2.0 * kPi * r / target_h - 1e-9)));
    m = std::min(m, nb);
    Ring rg;
    for (int i = 0; i < m; ++i) {
      const double t = t0 + 2.0 * kPi * i / m;
      const double rho = frac * ray_polygon(sigma, c, t);
      rg.ids.push_back(vm.num_vertices());
      rg.ang.push_back(t);
      vm.vertices.push_back({c.x + rho * std::cos(t), c.y + rho * std::sin(t)});
    }
    ring_list.push_back(std::move(rg));
  }
  Ring outer;
  vm.boundary_vertex_map.assign(nb, -1);
  for (int i = 0; i < nb; ++i) {
    outer.ids.push_back(vm.num_vertices());
    outer.ang.push_back(bang[i]);
    vm.boundary_vertex_map[order[i]] = vm.num_vertices();
    vm.vertices.push_back(sigma.vertices[order[i]]);
  }
  ring_list.push_back(std::move(outer));

  auto add_tri = [&](int a, int b, int d) {
    std::array<int, 3> t{a, b, d};
    const double ar = cross(vm.vertices[b] - vm.vertices[a], vm.vertices[d] - vm.vertices[a]);
    if (ar < 0.0) std::swap(t[1], t[2]);
    vm.triangles.push_back(t);
  };
  // fan around the center
  {
    const Ring& r1 = ring_list.front();
    const int m = static_cast<int>(r1.ids.size());
    for (int i = 0; i < m; ++i) add_tri(0, r1.ids[i], r1.ids[(i + 1) % m]);
  }
  // zip consecutive rings by merging their angle sequences
  for (std::size_t q = 0; q + 1 < ring_list.size(); ++q) {
    const Ring& in = ring_list[q];
    const Ring& out = ring_list[q + 1];
    const int ma = static_cast<int>(in.ids.size()), mb = static_cast<int>(out.ids.size());
    auto ang_in = [&](int i) { return in.ang[i % ma] + 2.0 * kPi * (i / ma); };
    auto ang_out = [&](int j) { return out.ang[j % mb] + 2.0 * kPi * (j / mb); };
    int i = 0, j = 0;
    while (i < ma || j < mb) {
      const bool advance_out = (i >= ma) || (j < mb && ang_out(j + 1) <= ang_in(i + 1));
      if (advance_out) {
        add_tri(in.ids[i % ma], out.ids[j % mb], out.ids[(j + 1) % mb]);
        ++j;
      } else {
        add_tri(in.ids[i % ma], out.ids[j % mb], in.ids[(i + 1) % ma]);
        ++i;
      }
    }
  }
  for (int t = 0; t < vm.num_triangles(); ++t)
    if (!(vm.triangle_area(t) > 0.0)) throw Error(ErrorKind::mesh, "triangulate_disk produced a degenerate triangle");
  return vm;
}

}  // namespace hmt
