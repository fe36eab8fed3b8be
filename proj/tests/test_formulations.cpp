#include <cmath>

#include "doctest.h"
#include "hmt/formulations.hpp"
#include "hmt/linalg.hpp"
#include "hmt/studies.hpp"
#include "oracles.hpp"

using namespace hmt;

namespace {

const FormulationKind kAllN1[] = {FormulationKind::stf, FormulationKind::cstf, FormulationKind::mtf,
                                  FormulationKind::cmtf};

OwnedProblem concentric(int n, double k0 = 1.0, double k1 = 2.0, double ks = 1.5) {
  Problem pr;
  pr.medium = MediumField::constant(ks);
  pr.kappa = {WaveNumber::real(k0), WaveNumber::real(k1)};
  pr.wave = IncidentWave::plane(k0, 0.3);
  return own(make_concentric_config(1.0, 2.0, n, 2 * n, 2.0 * kPi / n), pr);
}

OwnedProblem halfdisk(int n_arc, double k0 = 1.0, double k1 = 2.0, double ks = 1.5) {
  Problem pr;
  pr.medium = MediumField::constant(ks);
  pr.kappa = {WaveNumber::real(k0), WaveNumber::real(k1)};
  pr.wave = IncidentWave::plane(k0, 0.3);
  return own(make_halfdisk_config(1.0, 2.0, n_arc, 0.3), pr);
}

// -1 on volume and Dirichlet-type unknowns, +1 on Neumann unknowns
RVec sign_pattern(const DofLayout& l, const SubdomainPartition& p) {
  RVec d = RVec::Ones(l.size);
  for (const DofBlock& b : l.blocks) {
    if (b.name == "volume" || b.name == "skeleton_dir") d.segment(b.offset, b.size).setConstant(-1.0);
    if (b.name.rfind("trace_", 0) == 0) {
      const int j = std::stoi(b.name.substr(6));
      d.segment(b.offset, p.gamma[j].curve.num_vertices()).setConstant(-1.0);
    }
  }
  return d;
}

double asymmetry(const CMat& a, const RVec& d) {
  const CMat s = d.cast<cplx>().asDiagonal() * a;
  return (s - s.transpose()).norm() / s.norm();
}

}  // namespace

TEST_CASE("formulation names round trip") {
  for (FormulationKind k : {FormulationKind::costabel, FormulationKind::stf, FormulationKind::cstf, FormulationKind::mtf,
                            FormulationKind::cmtf})
    CHECK(parse_formulation(to_string(k)) == k);
  CHECK_THROWS_AS(parse_formulation("bem"), Error);
}

TEST_CASE("incident traces") {
  const IncidentWave w = IncidentWave::plane(2.0, 0.0, cplx(0.5, 0.5));
  CurveMesh m;
  m.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.panels = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  const TraceVec t = incident_traces(w, m);
  CHECK(t.dir(0) == cplx(0.5, 0.5));
  // panels along x have normals orthogonal to the direction of travel
  CHECK(t.neu(0) == cplx(0.0));
  CHECK(t.neu(2) == cplx(0.0));
  const TraceVec c = incident_traces(IncidentWave::plane(2.0, 0.8, 3.0), make_circle_mesh(1.0, 40));
  for (int i = 0; i < 40; ++i) CHECK(std::abs(std::abs(c.dir(i)) - 3.0) <= 1e-14);
}

TEST_CASE("validation") {
  OwnedProblem op = concentric(16);
  CHECK_THROWS_WITH_AS(op.problem.validate(FormulationKind::costabel), "costabel requires n=0", Error);
  op.problem.kappa.pop_back();
  CHECK_THROWS_AS(op.problem.validate(FormulationKind::stf), Error);
  OwnedProblem bad = concentric(16);
  bad.problem.wave.k0 = 1.1;
  CHECK_THROWS_AS(bad.problem.validate(FormulationKind::mtf), Error);
  Problem none;
  CHECK_THROWS_AS(none.validate(FormulationKind::stf), Error);
}

TEST_CASE("layouts") {
  const OwnedProblem op = concentric(16);
  const SubdomainPartition& p = op.config->partition;
  const int nv = op.config->volume.num_vertices();
  const DofLayout s = make_layout(FormulationKind::stf, p, op.config->volume);
  CHECK(s.block("volume").size == nv);
  CHECK(s.block("skeleton_neu").size == static_cast<int>(p.skeleton_panels.size()));
  const DofLayout m = make_layout(FormulationKind::mtf, p, op.config->volume);
  CHECK(m.block("p_sigma").size == p.sigma.curve.num_panels());
  CHECK(m.size == nv + p.gamma[1].curve.num_vertices() + p.gamma[1].curve.num_panels() + p.sigma.curve.num_panels());
  CHECK_THROWS_AS(m.block("skeleton_dir"), Error);
}

TEST_CASE("zero source and zero wave give a zero right-hand side and a zero field") {
  OwnedProblem op = concentric(16);
  op.problem.wave.amplitude = 0.0;
  for (FormulationKind k : kAllN1) {
    const DiscreteSystem s = assemble(k, op.problem);
    CHECK(s.rhs.norm() == 0.0);
    const SolutionBundle b = solve(s, op.problem);
    CHECK(b.x.norm() == 0.0);
    CHECK(reconstruct(b, {{0.1, 0.2}, {1.5, 0.0}, {3.0, 1.0}}).norm() == 0.0);
  }
}

TEST_CASE("documented symmetry pattern: exact for stf and mtf") {
  for (const OwnedProblem& op : {concentric(16), halfdisk(16)}) {
    for (FormulationKind k : {FormulationKind::stf, FormulationKind::mtf}) {
      const DiscreteSystem s = assemble(k, op.problem);
      CHECK(asymmetry(s.matrix, sign_pattern(s.layout, op.config->partition)) <= 1e-10);
    }
  }
}

TEST_CASE("combined formulations: the M term breaks the symmetry at O(h^2)") {
  // the regularizer is symmetric only through its own duality, not entrywise against the BEM blocks
  for (FormulationKind k : {FormulationKind::cstf, FormulationKind::cmtf}) {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
      const OwnedProblem op = concentric(n);
      const DiscreteSystem s = assemble(k, op.problem);
      const double a = asymmetry(s.matrix, sign_pattern(s.layout, op.config->partition));
      if (prev > 0.0) CHECK(std::log(prev / a) / std::log(2.0) >= 1.7);
      prev = a;
    }
  }
}

TEST_CASE("combined formulations are complex-symmetric to 1e-10" * doctest::should_fail()) {
  const OwnedProblem op = concentric(32);
  const DiscreteSystem s = assemble(FormulationKind::cstf, op.problem);
  CHECK(asymmetry(s.matrix, sign_pattern(s.layout, op.config->partition)) <= 1e-10);
}

TEST_CASE("stf and cstf differ only where C acts") {
  const OwnedProblem op = concentric(16);
  const DiscreteSystem a = assemble(FormulationKind::stf, op.problem);
  const DiscreteSystem b = assemble(FormulationKind::cstf, op.problem);
  REQUIRE(a.layout.size == b.layout.size);
  const CMat d = a.matrix - b.matrix;
  const DofBlock& neu = a.layout.block("skeleton_neu");
  int rows = 0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d.row(i).cwiseAbs().maxCoeff() == 0.0) continue;
    ++rows;
    CHECK(i >= neu.offset);
    CHECK(i < neu.offset + neu.size);
  }
  CHECK(rows > 0);
  CHECK(rows <= op.config->partition.sigma.curve.num_panels());
}

TEST_CASE("costabel and mtf coincide for a single inclusion") {
  Problem pr;
  pr.medium = MediumField::constant(1.7);
  pr.kappa = {WaveNumber::real(2.0)};
  pr.wave = IncidentWave::plane(2.0, 0.0);
  const OwnedProblem op = own(make_disk_config(1.0, 24, 0.3), pr);
  const DiscreteSystem c = assemble(FormulationKind::costabel, op.problem);
  const DiscreteSystem m = assemble(FormulationKind::mtf, op.problem);
  const SubdomainPartition& p = op.config->partition;
  REQUIRE(c.layout.size == m.layout.size);
  const int n = c.layout.size, nv = op.config->volume.num_vertices();
  RMat perm = RMat::Zero(n, n);
  for (int i = 0; i < nv; ++i) perm(i, i) = 1.0;
  for (int k = 0; k < p.gamma[0].curve.num_panels(); ++k)
    for (int s = 0; s < p.sigma.curve.num_panels(); ++s)
      if (p.sigma.skel_panel[s] == p.gamma[0].skel_panel[k]) perm(m.layout.p_sigma_offset + s, c.layout.p_sigma_offset + k) = -1.0;
  const CMat pc = perm.cast<cplx>();
  const double scale = m.matrix.cwiseAbs().maxCoeff();
  CHECK((pc * c.matrix * pc.transpose() - m.matrix).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  CHECK((pc * c.rhs - m.rhs).cwiseAbs().maxCoeff() <= 1e-12 * m.rhs.cwiseAbs().maxCoeff());
}

TEST_CASE("Gaarding proxy: Hermitian part positive definite at k = i") {
  for (const OwnedProblem& base : {concentric(16), halfdisk(16)}) {
    Problem pr = base.problem;
    pr.medium = MediumField::constant(0.0);
    for (auto& k : pr.kappa) k = WaveNumber::imaginary(1.0);
    pr.wave.amplitude = 0.0;
    for (FormulationKind kind : {FormulationKind::stf, FormulationKind::mtf}) {
      const DiscreteSystem s = assemble(kind, pr);
      CHECK(min_eig_hermitian_part(s.matrix) > 0.0);
    }
  }
}

TEST_CASE("cmtf solutions satisfy mtf: discrete residual is O(h^2)") {
  std::vector<double> res;
  for (int n : {16, 32, 64}) {
    const OwnedProblem op = concentric(n);
    const DiscreteSystem mtf = assemble(FormulationKind::mtf, op.problem);
    const DiscreteSystem cmtf = assemble(FormulationKind::cmtf, op.problem);
    const SolutionBundle b = solve(cmtf, op.problem);
    res.push_back((mtf.matrix * b.x - mtf.rhs).norm() / mtf.rhs.norm());
  }
  for (std::size_t i = 1; i < res.size(); ++i) CHECK(std::log(res[i - 1] / res[i]) / std::log(2.0) >= 1.7);
}

TEST_CASE("cmtf solutions satisfy mtf to 1e-8" * doctest::should_fail()) {
  // the equivalence holds for exact Helmholtz fields inside Sigma, not for the FEM field
  const OwnedProblem op = concentric(32);
  const DiscreteSystem mtf = assemble(FormulationKind::mtf, op.problem);
  const SolutionBundle b = solve(assemble(FormulationKind::cmtf, op.problem), op.problem);
  CHECK((mtf.matrix * b.x - mtf.rhs).norm() / mtf.rhs.norm() <= 1e-8);
}

TEST_CASE("all formulations agree on the probe circle") {
  const OwnedProblem op = concentric(32);
  const std::vector<Point> probe = probe_circle(3.0, 64);
  std::vector<CVec> u;
  for (FormulationKind k : kAllN1) u.push_back(reconstruct(solve(assemble(k, op.problem), op.problem), probe));
  for (std::size_t i = 1; i < u.size(); ++i) CHECK(relative_l2(u[i], u[0]) <= 0.01);
}

TEST_CASE("transmission check: the field is continuous across interfaces under refinement") {
  for (FormulationKind kind : {FormulationKind::stf, FormulationKind::mtf}) {
    double prev = 1e300;
    for (int n : {16, 32, 64}) {
      const OwnedProblem op = concentric(n);
      const SolutionBundle b = solve(assemble(kind, op.problem), op.problem);
      const double d = 0.6 * 2.0 * kPi * 2.0 / (2 * n);  // just beyond the near-field cutoff
      std::vector<Point> in, in2, out, out2;
      for (int i = 0; i < 16; ++i) {
        const double t = 2.0 * kPi * (i + 0.5) / 16;
        const Point e{std::cos(t), std::sin(t)};
        in.push_back((2.0 - d) * e);
        in2.push_back((2.0 - 2.0 * d) * e);
        out.push_back((2.0 + d) * e);
        out2.push_back((2.0 + 2.0 * d) * e);
      }
      // linear extrapolation to the interface from each side
      const CVec ui = 2.0 * reconstruct(b, in) - reconstruct(b, in2);
      const CVec uo = 2.0 * reconstruct(b, out) - reconstruct(b, out2);
      const double jump = (ui - uo).norm() / uo.norm();
      CHECK(jump < prev);
      prev = jump;
    }
    CHECK(prev <= 0.05);
  }
}

TEST_CASE("reconstruct refuses points on an interface") {
  const OwnedProblem op = concentric(16);
  const SolutionBundle b = solve(assemble(FormulationKind::stf, op.problem), op.problem);
  CHECK_THROWS_AS(reconstruct(b, {{2.0, 0.0}}), Error);
  CHECK_NOTHROW(reconstruct(b, {{0.999, 0.0}}));  // Sigma side uses the volume field
}

TEST_CASE("solution bundle diagnostics") {
  const OwnedProblem op = halfdisk(16);
  for (FormulationKind k : kAllN1) {
    const SolutionBundle b = solve(assemble(k, op.problem), op.problem);
    CHECK(b.residual <= 1e-12);
    CHECK(b.sigma_min > 0.0);
    CHECK(b.sigma_max >= b.sigma_min);
    const SolutionTraces t = solution_traces(b);
    CHECK(t.volume.size() == op.config->volume.num_vertices());
  }
}

TEST_CASE("energy gram is symmetric positive definite") {
  const OwnedProblem op = concentric(16);
  for (FormulationKind k : kAllN1) {
    const DofLayout l = make_layout(k, op.config->partition, op.config->volume);
    const RMat g = energy_gram(l, op.problem);
    CHECK((g - g.transpose()).norm() <= 1e-14 * g.norm());
    Eigen::SelfAdjointEigenSolver<RMat> es(g);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}
