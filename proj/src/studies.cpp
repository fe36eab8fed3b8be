#include "hmt/studies.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>

#include "hmt/linalg.hpp"
#include "hmt/parallel.hpp"

namespace hmt {

OwnedProblem own(Configuration config, Problem problem) {
  OwnedProblem o;
  o.config = std::make_shared<Configuration>(std::move(config));
  o.problem = std::move(problem);
  o.problem.config = o.config.get();
  return o;
}

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw Error(ErrorKind::config, "linspace needs at least one step");
  std::vector<double> g(steps);
  for (int i = 0; i < steps; ++i) g[i] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  return g;
}

std::vector<SweepRow> sweep_sigma_min(FormulationKind kind, const std::function<OwnedProblem(double)>& problem_at,
                                      const std::vector<double>& grid, const SweepOptions& opt) {
  std::vector<SweepRow> rows(grid.size());
  // points are independent; each writes its own row so output order is grid order
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    const OwnedProblem op = problem_at(grid[i]);
    const DiscreteSystem s = assemble(kind, op.problem);
    const SingularRange plain = singular_range(s.matrix);
    SweepRow& r = rows[i];
    r.k0 = grid[i];
    r.kind = kind;
    r.sigma_min = plain.sigma_min;
    r.condition = plain.sigma_min > 0.0 ? plain.sigma_max / plain.sigma_min : INFINITY;
    if (opt.energy_norm) {
      const CMat g = energy_gram(s.layout, op.problem).cast<cplx>();
      r.sigma_min_energy = singular_range(s.matrix, &g).sigma_min;
    }
  });
  return rows;
}

std::vector<Point> probe_circle(double r, int n) {
  std::vector<Point> p(n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    p[i] = {r * std::cos(t), r * std::sin(t)};
  }
  return p;
}

double relative_l2(const CVec& approx, const CVec& exact) {
  if (approx.size() != exact.size()) throw Error(ErrorKind::size_mismatch, "relative_l2 sizes");
  const double d = exact.norm();
  return d > 0.0 ? (approx - exact).norm() / d : (approx - exact).norm();
}

std::vector<ConvergenceRow> convergence_study(FormulationKind kind,
                                              const std::function<OwnedProblem(int)>& problem_at_level,
                                              int levels, const std::function<cplx(Point)>& exact,
                                              const ConvergenceOptions& opt) {
  if (levels < 1) throw Error(ErrorKind::config, "convergence study needs at least one level");
  const std::vector<Point> probe = probe_circle(opt.probe_radius, opt.probe_angles);
  CVec ref(probe.size());
  for (std::size_t i = 0; i < probe.size(); ++i) ref(i) = exact(probe[i]);
  std::vector<ConvergenceRow> rows;
  for (int l = 0; l < levels; ++l) {
    const auto t0 = std::chrono::steady_clock::now();
    const OwnedProblem op = problem_at_level(l);
    const DiscreteSystem s = assemble(kind, op.problem);
    const SolutionBundle b = solve(s, op.problem);
    const CVec u = reconstruct(b, probe);
    ConvergenceRow r;
    r.level = l;
    for (const BoundaryMesh& g : op.config->partition.gamma) r.h = std::max(r.h, g.curve.max_panel_length());
    r.dofs = s.layout.size;
    r.error = relative_l2(u, ref);
    if (!rows.empty() && r.error > 0.0 && rows.back().error > 0.0)
      r.order = std::log(rows.back().error / r.error) / std::log(rows.back().h / r.h);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hmt
