#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "hmt/acceptance.hpp"
#include "hmt/linalg.hpp"
#include "hmt/mesh_io.hpp"

namespace hmt::cli {

namespace {

Error config_error(const std::string& what) { return Error(ErrorKind::config, what); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw config_error("'" + key + "' expects a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw config_error("'" + key + "' expects an integer, got '" + v + "'");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw config_error("'" + key + "' expects true or false, got '" + v + "'");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

MediumField parse_medium(const std::string& spec) {
  const std::string s = trim(spec);
  if (s.rfind("table:", 0) == 0) {
    const std::string path = trim(s.substr(6));
    if (!std::filesystem::exists(path)) throw config_error("kappa_sigma table not found: " + path);
    return MediumField::table(path);
  }
  if (s.rfind("radial:", 0) == 0) {
    std::vector<double> c;
    for (const auto& t : split_list(s.substr(7))) c.push_back(to_double("kappa_sigma", t));
    if (c.empty()) throw config_error("radial kappa_sigma needs coefficients");
    return MediumField::radial([c](double r) {
      double v = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * r + *it;
      return v;
    });
  }
  return MediumField::constant(to_double("kappa_sigma", s));
}

bool constant_sigma(const RunConfig& c, double* value = nullptr) {
  const std::string s = trim(c.kappa_sigma);
  if (s.rfind("table:", 0) == 0 || s.rfind("radial:", 0) == 0) return false;
  if (value) *value = to_double("kappa_sigma", s);
  return true;
}

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace

int RunConfig::n() const {
  if (geometry == "disk" || geometry == "external-mesh") return 0;
  return 1;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  // '#' comments are accepted alongside the INI ';'
  std::stringstream filtered;
  for (std::string line; std::getline(in, line);) {
    const auto t = line.find_first_not_of(" \t");
    if (t != std::string::npos && line[t] == '#') continue;
    filtered << line << '\n';
  }
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(filtered);
  } catch (const CLI::Error& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  for (const auto& item : items) {
    std::string section;
    for (const auto& p : item.parents) section += (section.empty() ? "" : ".") + p;
    if (section == "default") section.clear();
    const std::string key = section.empty() ? item.name : section + "." + item.name;
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : " ") + v;
    value = trim(value);
    if (item.name == "++" || item.name == "--") continue;  // section markers emitted by the reader
    if (key == "seed") c.seed = static_cast<unsigned>(to_int(key, value));
    else if (key == "geometry.kind") c.geometry = value;
    else if (key == "geometry.radii") {
      c.radii.clear();
      for (const auto& t : split_list(value)) c.radii.push_back(to_double(key, t));
    } else if (key == "geometry.panels") {
      c.panels.clear();
      for (const auto& t : split_list(value)) c.panels.push_back(to_int(key, t));
    } else if (key == "geometry.volume_h") c.volume_h = to_double(key, value);
    else if (key == "geometry.mesh") c.mesh_file = value;
    else if (key == "medium.kappa0") c.kappa0 = to_double(key, value);
    else if (key == "medium.kappa") {
      c.kappa.clear();
      for (const auto& t : split_list(value)) c.kappa.push_back(to_double(key, t));
    } else if (key == "medium.kappa_sigma") c.kappa_sigma = value;
    else if (key == "medium.tie_kappa") c.tie_kappa = to_bool(key, value);
    else if (key == "incident.angle") c.angle_deg = to_double(key, value);
    else if (key == "incident.amplitude") c.amplitude = to_double(key, value);
    else if (key == "discretization.quad_order") c.quad_order = to_int(key, value);
    else if (key == "discretization.mie_tol") c.mie_tol = to_double(key, value);
    else if (key == "probe.radius") c.probe_radius = to_double(key, value);
    else if (key == "probe.angles") c.probe_angles = to_int(key, value);
    else if (key == "grid.xmin") c.grid_xmin = to_double(key, value);
    else if (key == "grid.xmax") c.grid_xmax = to_double(key, value);
    else if (key == "grid.ymin") c.grid_ymin = to_double(key, value);
    else if (key == "grid.ymax") c.grid_ymax = to_double(key, value);
    else if (key == "grid.nx") c.grid_nx = to_int(key, value);
    else if (key == "grid.ny") c.grid_ny = to_int(key, value);
    else if (key == "output.prefix") c.prefix = value;
    else throw config_error("unknown config key '" + key + "'");
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw config_error(what);
  };
  std::size_t nr = 0, np = 1;
  if (c.geometry == "concentric") nr = 2, np = 2;
  else if (c.geometry == "halfdisk") nr = 2;
  else if (c.geometry == "gap-demo") nr = 3;
  else if (c.geometry == "disk") nr = 1;
  else if (c.geometry == "external-mesh") nr = 0, np = 0;
  else throw config_error("unknown geometry kind '" + c.geometry + "'");
  need(c.radii.size() >= nr, "geometry '" + c.geometry + "' needs " + std::to_string(nr) + " radii");
  need(c.panels.size() >= np, "geometry '" + c.geometry + "' needs " + std::to_string(np) + " panel counts");
  for (double r : c.radii) need(r > 0.0, "radii must be positive");
  for (int p : c.panels) need(p > 0, "panel counts must be positive");
  if (c.geometry == "external-mesh") {
    need(!c.mesh_file.empty(), "external-mesh needs geometry.mesh");
    need(std::filesystem::exists(c.mesh_file), "mesh file not found: " + c.mesh_file);
  }
  need(c.kappa0 > 0.0, "wavenumbers must be positive");
  need(static_cast<int>(c.kappa.size()) >= c.n(), "medium.kappa needs one value per bounded subdomain");
  for (int j = 0; j < c.n(); ++j) need(c.kappa[j] > 0.0, "wavenumbers must be positive");
  need(c.volume_h >= 0.0, "volume_h must be >= 0");
  need(c.quad_order >= 2 && c.quad_order <= 16, "quad_order must be in [2,16]");
  need(c.mie_tol > 0.0 && c.mie_tol < 1e-2, "mie_tol must be in (0, 1e-2)");
  need(c.probe_radius > 0.0 && c.probe_angles >= 4, "probe needs a positive radius and >= 4 angles");
  need(c.grid_nx >= 1 && c.grid_ny >= 1, "grid needs nx, ny >= 1");
  parse_medium(c.kappa_sigma);
}

Configuration build_configuration(const RunConfig& c, int level) {
  const int s = 1 << level;
  const double vh = c.volume_h / s;
  if (c.geometry == "concentric")
    return make_concentric_config(c.radii[0], c.radii[1], c.panels[0] * s, c.panels[1] * s, vh);
  if (c.geometry == "halfdisk") return make_halfdisk_config(c.radii[0], c.radii[1], c.panels[0] * s, vh);
  if (c.geometry == "gap-demo") return make_gap_demo_config(c.radii[0], c.radii[1], c.radii[2], c.panels[0] * s, vh);
  if (c.geometry == "disk") return make_disk_config(c.radii[0], c.panels[0] * s, vh);
  if (level > 0) throw config_error("an external mesh cannot be refined");
  return make_external_config(read_volume_mesh(c.mesh_file));
}

Problem build_problem(const RunConfig& c, double k0) {
  Problem p;
  p.medium = parse_medium(c.kappa_sigma);
  p.kappa = {WaveNumber::real(k0)};
  for (int j = 0; j < c.n(); ++j) p.kappa.push_back(WaveNumber::real(c.tie_kappa ? k0 : c.kappa[j]));
  p.wave = IncidentWave::plane(k0, c.angle_deg * kPi / 180.0, c.amplitude);
  p.quad.gauss_order = c.quad_order;
  return p;
}

OwnedProblem build_owned(const RunConfig& c, double k0, int level) {
  return own(build_configuration(c, level), build_problem(c, k0));
}

bool has_mie(const RunConfig& c) {
  return (c.geometry == "concentric" || c.geometry == "disk") && constant_sigma(c);
}

MieSolution build_mie(const RunConfig& c) {
  double ks = 0.0;
  if (!has_mie(c) || !constant_sigma(c, &ks))
    throw config_error("the analytic solution needs a disk or concentric geometry with constant kappa_sigma");
  const IncidentWave w = IncidentWave::plane(c.kappa0, c.angle_deg * kPi / 180.0, c.amplitude);
  if (c.geometry == "disk") return MieSolution({c.radii[0]}, {ks, c.kappa0}, w, c.mie_tol);
  return MieSolution({c.radii[0], c.radii[1]}, {ks, c.kappa[0], c.kappa0}, w, c.mie_tol);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  for (const auto& r : rows)
    if (r.size() != header.size()) throw Error(ErrorKind::size_mismatch, "csv row width differs from the header");
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& s = cells[i];
      if (i) out << ',';
      if (s.find_first_of(",\"\n") != std::string::npos) {
        out << '"';
        for (char ch : s) out << (ch == '"' ? "\"\"" : std::string(1, ch));
        out << '"';
      } else {
        out << s;
      }
    }
    out << "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!out) throw Error(ErrorKind::io, "write failed: " + path);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          cell += '"';
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(cell);
      cell.clear();
    } else if (ch == '\n') {
      row.push_back(cell);
      rows.push_back(row);
      row.clear();
      cell.clear();
      any = false;
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  if (any) {
    row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

std::vector<Point> field_grid(const RunConfig& c) {
  std::vector<Point> pts;
  for (int j = 0; j < c.grid_ny; ++j)
    for (int i = 0; i < c.grid_nx; ++i) {
      const double x = c.grid_nx == 1 ? c.grid_xmin : c.grid_xmin + (c.grid_xmax - c.grid_xmin) * i / (c.grid_nx - 1);
      const double y = c.grid_ny == 1 ? c.grid_ymin : c.grid_ymin + (c.grid_ymax - c.grid_ymin) * j / (c.grid_ny - 1);
      pts.push_back({x, y});
    }
  return pts;
}

namespace {

std::vector<std::vector<std::string>> field_rows(const std::vector<Point>& pts, const CVec& u) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < pts.size(); ++i)
    rows.push_back({num(pts[i].x), num(pts[i].y), num(u(i).real()), num(u(i).imag())});
  return rows;
}

std::vector<std::vector<std::string>> probe_rows(const std::vector<Point>& pts, const CVec& u) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < pts.size(); ++i)
    rows.push_back({num(2.0 * kPi * i / pts.size()), num(pts[i].x), num(pts[i].y), num(u(i).real()),
                    num(u(i).imag())});
  return rows;
}

}  // namespace

int cmd_verify(const RunConfig& c, const std::vector<std::string>& ids) {
  const std::vector<std::string> use =
      ids.empty() ? std::vector<std::string>{"A1", "A2", "A3", "A4", "A5", "A6", "A7", "A12"} : ids;
  for (const auto& id : use) {
    bool known = false;
    for (const auto& cr : acceptance_criteria()) known = known || cr.id == id;
    if (!known) throw config_error("unknown criterion '" + id + "'");
  }
  bool ok = true;
  for (const auto& id : use) {
    const auto r = run_criteria({id}, c.seed);
    std::cout << format_result(r.at(0)) << std::endl;
    ok = ok && r.at(0).pass;
  }
  std::cout << (ok ? "verify: all PASS" : "verify: FAIL") << std::endl;
  return ok ? 0 : 1;
}

int cmd_solve(const RunConfig& c, FormulationKind kind, double probe_radius) {
  const OwnedProblem op = build_owned(c, c.kappa0);
  op.problem.validate(kind);
  const DiscreteSystem s = assemble(kind, op.problem);
  const SolutionBundle b = solve(s, op.problem);
  std::cout << "formulation " << to_string(kind) << ": " << s.layout.size << " dofs, sigma_min "
            << num(b.sigma_min) << ", sigma_max " << num(b.sigma_max) << ", residual " << num(b.residual)
            << std::endl;
  const std::vector<Point> probe = probe_circle(probe_radius, c.probe_angles);
  const CVec u = reconstruct(b, probe);
  write_csv(c.prefix + "_probe.csv", {"angle", "x", "y", "re", "im"}, probe_rows(probe, u));
  if (has_mie(c)) {
    const MieSolution mie = build_mie(c);
    CVec ref(probe.size());
    for (std::size_t i = 0; i < probe.size(); ++i) ref(i) = mie.total(probe[i]);
    std::cout << "relative L2 error vs analytic solution on r=" << num(probe_radius) << ": "
              << num(relative_l2(u, ref)) << std::endl;
  }
  // grid points too close to an interface are left out
  const SubdomainPartition& p = op.config->partition;
  double hmax = 0.0;
  for (const auto& g : p.gamma) hmax = std::max(hmax, g.curve.max_panel_length());
  std::vector<Point> grid;
  for (const Point& x : field_grid(c))
    if (p.locate(x) == p.sigma_index() || p.distance_to_skeleton(x) >= 0.5 * hmax) grid.push_back(x);
  const CVec g = reconstruct(b, grid);
  write_csv(c.prefix + "_field.csv", {"x", "y", "re", "im"}, field_rows(grid, g));
  std::cout << "wrote " << c.prefix << "_probe.csv and " << c.prefix << "_field.csv" << std::endl;
  return 0;
}

int cmd_sweep(const RunConfig& c, FormulationKind kind, double kmin, double kmax, int steps) {
  if (!(kmin > 0.0) || !(kmax > kmin) || steps < 3) throw config_error("sweep needs 0 < kmin < kmax and steps >= 3");
  build_owned(c, kmin).problem.validate(kind);  // fail before the loop
  const auto rows = sweep_sigma_min(kind, [&c](double k0) { return build_owned(c, k0); }, linspace(kmin, kmax, steps));
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows)
    out.push_back({num(r.k0), num(r.sigma_min), num(r.sigma_min_energy), num(r.condition), to_string(r.kind)});
  write_csv(c.prefix + "_sweep.csv", {"k0", "sigma_min", "sigma_min_energy", "condition", "kind"}, out);
  std::cout << "wrote " << rows.size() << " rows to " << c.prefix << "_sweep.csv" << std::endl;
  return 0;
}

int cmd_converge(const RunConfig& c, FormulationKind kind, int levels) {
  if (levels < 3) throw config_error("converge needs at least 3 levels");
  if (!has_mie(c)) throw config_error("converge needs a disk or concentric geometry with constant kappa_sigma");
  build_owned(c, c.kappa0).problem.validate(kind);
  const MieSolution mie = build_mie(c);
  ConvergenceOptions opt;
  opt.probe_radius = c.probe_radius;
  opt.probe_angles = c.probe_angles;
  const auto rows = convergence_study(
      kind, [&c](int l) { return build_owned(c, c.kappa0, l); }, levels, [&mie](Point x) { return mie.total(x); }, opt);
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) {
    out.push_back({std::to_string(r.level), num(r.h), std::to_string(r.dofs), num(r.error), num(r.order)});
    std::cout << "level " << r.level << " h " << num(r.h) << " error " << num(r.error) << " order " << num(r.order)
              << " (" << r.seconds << " s)" << std::endl;
  }
  write_csv(c.prefix + "_converge.csv", {"level", "h", "dofs", "error", "order"}, out);
  return 0;
}

int cmd_mie(const RunConfig& c) {
  const MieSolution mie = build_mie(c);
  const std::vector<Point> probe = probe_circle(c.probe_radius, c.probe_angles);
  CVec u(probe.size());
  for (std::size_t i = 0; i < probe.size(); ++i) u(i) = mie.total(probe[i]);
  write_csv(c.prefix + "_mie_probe.csv", {"angle", "x", "y", "re", "im"}, probe_rows(probe, u));
  const std::vector<Point> grid = field_grid(c);
  CVec g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g(i) = mie.total(grid[i]);
  write_csv(c.prefix + "_mie_field.csv", {"x", "y", "re", "im"}, field_rows(grid, g));
  std::cout << "mode truncation M = " << mie.truncation() << "; wrote " << c.prefix << "_mie_probe.csv and "
            << c.prefix << "_mie_field.csv" << std::endl;
  return 0;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::config:
    case ErrorKind::mesh:
    case ErrorKind::io:
    case ErrorKind::domain:
      return 2;
    case ErrorKind::near_singular:
    case ErrorKind::singular:
      return 3;
    default:
      return 4;
  }
}

}  // namespace hmt::cli
