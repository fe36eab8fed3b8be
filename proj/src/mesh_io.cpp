#include "hmt/mesh_io.hpp"

#include <fstream>
#include <iomanip>

namespace hmt {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << std::setprecision(17);
  return out;
}

void check(std::istream& in, const std::string& path) {
  if (!in) throw Error(ErrorKind::io, "malformed file " + path);
}

}  // namespace

void write_volume_mesh(const std::string& path, const VolumeMesh& mesh) {
  auto out = open_out(path);
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.boundary_vertex_map.size() << '\n';
  for (const Point& p : mesh.vertices) out << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (std::size_t i = 0; i < mesh.boundary_vertex_map.size(); ++i) out << i << ' ' << mesh.boundary_vertex_map[i] << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

VolumeMesh read_volume_mesh(const std::string& path) {
  auto in = open_in(path);
  long nv = 0, nt = 0, nb = 0;
  in >> nv >> nt >> nb;
  check(in, path);
  if (nv < 3 || nt < 1 || nb < 3) throw Error(ErrorKind::io, "bad header in " + path);
  VolumeMesh m;
  m.vertices.resize(nv);
  for (auto& p : m.vertices) in >> p.x >> p.y;
  m.triangles.resize(nt);
  for (auto& t : m.triangles) {
    in >> t[0] >> t[1] >> t[2];
    for (int v : t)
      if (v < 0 || v >= nv) throw Error(ErrorKind::io, "triangle index out of range in " + path);
  }
  m.boundary_vertex_map.assign(nb, -1);
  for (long i = 0; i < nb; ++i) {
    long s = 0, v = 0;
    in >> s >> v;
    if (s < 0 || s >= nb || v < 0 || v >= nv) throw Error(ErrorKind::io, "boundary map out of range in " + path);
    m.boundary_vertex_map[s] = static_cast<int>(v);
  }
  check(in, path);
  return m;
}

void write_curve_mesh(const std::string& path, const CurveMesh& mesh) {
  auto out = open_out(path);
  out << mesh.num_vertices() << ' ' << mesh.num_panels() << '\n';
  for (const Point& p : mesh.vertices) out << p.x << ' ' << p.y << '\n';
  for (const auto& pn : mesh.panels) out << pn[0] << ' ' << pn[1] << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

CurveMesh read_curve_mesh(const std::string& path) {
  auto in = open_in(path);
  long nv = 0, np = 0;
  in >> nv >> np;
  check(in, path);
  CurveMesh m;
  m.vertices.resize(nv);
  for (auto& p : m.vertices) in >> p.x >> p.y;
  m.panels.resize(np);
  for (auto& pn : m.panels) {
    in >> pn[0] >> pn[1];
    if (pn[0] < 0 || pn[0] >= nv || pn[1] < 0 || pn[1] >= nv) throw Error(ErrorKind::io, "panel index out of range");
  }
  check(in, path);
  return m;
}

void write_matrix_text(const std::string& path, const CMat& m) {
  auto out = open_out(path);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << m(i, j).real() << ' ' << m(i, j).imag() << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

CMat read_matrix_text(const std::string& path) {
  auto in = open_in(path);
  long r = 0, c = 0;
  in >> r >> c;
  check(in, path);
  CMat m(r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j) {
      double re = 0, im = 0;
      in >> re >> im;
      m(i, j) = cplx(re, im);
    }
  check(in, path);
  return m;
}

}  // namespace hmt
