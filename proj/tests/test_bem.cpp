#include <cmath>

#include "doctest.h"
#include "hmt/bem.hpp"
#include "hmt/formulations.hpp"
#include "hmt/linalg.hpp"
#include "oracles.hpp"

using namespace hmt;

namespace {

RMat dirichlet_flip(const CurveMesh& m) {
  RMat d = RMat::Identity(m.num_vertices() + m.num_panels(), m.num_vertices() + m.num_panels());
  for (int i = 0; i < m.num_vertices(); ++i) d(i, i) = -1.0;
  return d;
}

double bessel_dj(int m, double x) {
  return m == 0 ? -bessel(BesselKind::J, 1, x) : 0.5 * (bessel(BesselKind::J, m - 1, x) - bessel(BesselKind::J, m + 1, x));
}

cplx hankel_d(int m, double x) { return m == 0 ? -hankel1(1, x) : 0.5 * (hankel1(m - 1, x) - hankel1(m + 1, x)); }

// Rayleigh quotient of W for the P1 interpolant of e^{i m phi}, normalized by the P1 mass
cplx w_symbol(int n, int mode, double k) {
  const CurveMesh m = make_circle_mesh(1.0, n);
  const OperatorBlockMatrix op = assemble_block(WaveNumber::real(k), m);
  CVec u(n);
  for (int j = 0; j < n; ++j) u(j) = std::exp(kI * (mode * std::atan2(m.vertices[j].y, m.vertices[j].x)));
  const RMat mass = p1_mass(m);
  return (u.adjoint() * (op.W * u))(0, 0) / (u.adjoint() * (mass.cast<cplx>() * u))(0, 0);
}

double odd_calderon_square(int n) {
  // B is invertible on odd cycles, so the discrete A can be formed
  const CurveMesh m = make_circle_mesh(1.0, n);
  const OperatorBlockMatrix op = assemble_block(WaveNumber::real(2.0), m);
  const CMat t = theta_pairing_matrix(m).cast<cplx>();
  const Eigen::PartialPivLU<CMat> lu(t);
  const CVec x = incident_traces(IncidentWave::plane(2.0, 0.3), m).stacked();
  const CVec ax = lu.solve(op.bilinear * x);
  const CVec a2x = lu.solve(op.bilinear * ax);
  return (a2x - 0.25 * x).norm() / x.norm();
}

}  // namespace

TEST_CASE("single layer Fourier symbol on the circle") {
  const double k = 1.3;
  double prev = 1.0;
  for (int n : {64, 128, 256}) {
    const CurveMesh m = make_circle_mesh(1.0, n);
    const OperatorBlockMatrix op = assemble_block(WaveNumber::real(k), m);
    double worst = 0.0;
    for (int mode = 0; mode <= 4; ++mode) {
      CVec p(n);
      double mass = 0.0;
      for (int j = 0; j < n; ++j) {
        const Point c = m.midpoint(j);
        p(j) = std::exp(kI * (mode * std::atan2(c.y, c.x)));
        mass += m.length(j);
      }
      const cplx got = (p.adjoint() * (op.V * p))(0, 0) / mass;
      // circle symbol from the addition theorem, with series/integral oracles
      const double j = oracle::bessel_j_series(mode, k);
      const double y = oracle::bessel_y_integral(mode, k);
      const cplx want = kI * (oracle::pi / 2.0) * j * cplx(j, y);
      worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
    if (n == 256) CHECK(worst <= 0.02);
    // at least second order
    if (n > 64) CHECK(worst <= prev / 3.0);
    prev = worst;
  }
}

TEST_CASE("hypersingular Fourier symbol converges at least at first order") {
  const double k = 1.3;
  double prev[5] = {0, 0, 0, 0, 0};
  for (int n : {64, 128, 256}) {
    for (int mode = 0; mode <= 4; ++mode) {
      const cplx want = -kI * (oracle::pi / 2.0) * k * k * bessel_dj(mode, k) * hankel_d(mode, k);
      const double e = std::abs(w_symbol(n, mode, k) - want) / std::abs(want);
      CAPTURE(n);
      CAPTURE(mode);
      CHECK(e <= 0.05);
      if (n > 64) CHECK(e <= prev[mode] / 1.8);
      prev[mode] = e;
    }
  }
}

TEST_CASE("bilinear form symmetry pattern") {
  for (const WaveNumber& k : {WaveNumber::real(2.0), WaveNumber::imaginary(1.0)}) {
    const CurveMesh m = make_circle_mesh(1.0, 64);
    const OperatorBlockMatrix op = assemble_block(k, m);
    const CMat s = dirichlet_flip(m).cast<cplx>() * op.bilinear;
    CHECK((s - s.transpose()).norm() <= 1e-10 * s.norm());
    CHECK((op.V - op.V.transpose()).norm() <= 1e-12 * op.V.norm());
    CHECK((op.W - op.W.transpose()).norm() <= 1e-12 * op.W.norm());
    // the two kernels differ by the sign of x - y
    CHECK((op.K.transpose() + op.Kp).norm() <= 1e-12 * op.K.norm());
  }
}

TEST_CASE("Calderon projector on Cauchy data") {
  double prev = 1.0;
  for (int n : {32, 64, 128}) {
    const CurveMesh m = make_circle_mesh(1.0, n);
    const OperatorBlockMatrix op = assemble_block(WaveNumber::real(2.0), m);
    const CVec x = incident_traces(IncidentWave::plane(2.0, 0.7), m).stacked();
    const CMat t = theta_pairing_matrix(m).cast<cplx>();
    const double e = (op.bilinear * x - 0.5 * (t * x)).norm() / (t * x).norm();
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev <= 0.01);
}

TEST_CASE("A squared is a quarter of the identity under refinement") {
  const double e1 = odd_calderon_square(63), e2 = odd_calderon_square(127), e3 = odd_calderon_square(255);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
  CHECK(e3 <= 0.01);
}

TEST_CASE("Gaarding positivity at k = i") {
  for (int n : {64, 128}) {
    const CurveMesh m = make_circle_mesh(1.0, n);
    const OperatorBlockMatrix op = assemble_block(WaveNumber::imaginary(1.0), m);
    CHECK(min_eig_hermitian_part(op.bilinear) > 0.0);
    // V and W are real positive definite in this regime
    CHECK(op.V.imag().norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<RMat> ev(op.V.real());
    CHECK(ev.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("Im-positivity of the form at real wavenumbers") {
  std::mt19937 g(42);
  for (double k : {1.0, 2.5}) {
    const CurveMesh m = make_circle_mesh(1.0, 64);
    const OperatorBlockMatrix op = assemble_block(WaveNumber::real(k), m);
    const CMat s = dirichlet_flip(m).cast<cplx>() * op.bilinear;
    for (int i = 0; i < 100; ++i) {
      const CVec u = oracle::random_cvec(g, s.cols());
      CHECK((u.adjoint() * (s * u))(0, 0).imag() >= -1e-8 * u.squaredNorm());
    }
  }
}

TEST_CASE("self-panel rules agree") {
  const CurveMesh m = make_circle_mesh(1.0, 32);
  QuadratureSpec graded;
  graded.self_panel_rule = SelfPanelRule::graded_subdivision;
  graded.graded_levels = 12;
  const OperatorBlockMatrix a = assemble_block(WaveNumber::real(1.5), m);
  const OperatorBlockMatrix b = assemble_block(WaveNumber::real(1.5), m, graded);
  CHECK((a.V - b.V).norm() <= 1e-6 * a.V.norm());
  CHECK((a.W - b.W).norm() <= 1e-6 * a.W.norm());
  QuadratureSpec bad;
  bad.gauss_order = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("cross blocks") {
  const Configuration c = make_concentric_config(1.0, 2.0, 32, 48);
  const SubdomainPartition& p = c.partition;
  const WaveNumber k = WaveNumber::real(1.5);
  const CrossBlock shared = assemble_cross(k, p.sigma_index(), 1, p);
  CHECK(shared.shared_panel_correction);
  const CrossBlock apart = assemble_cross(k, p.sigma_index(), 0, p);
  CHECK_FALSE(apart.shared_panel_correction);
  CHECK(apart.matrix.allFinite());
  CHECK(shared.matrix.allFinite());
  CHECK(apart.matrix.rows() == p.gamma[0].curve.num_vertices() + p.gamma[0].curve.num_panels());
  CHECK(apart.matrix.cols() == p.sigma.curve.num_vertices() + p.sigma.curve.num_panels());
}

TEST_CASE("potential of interior Cauchy data vanishes on an outer boundary") {
  // G^Sigma of interior Cauchy data is zero outside Sigma, so all traces on Gamma_1 vanish
  double prev = 1.0;
  for (int n : {16, 32, 64}) {
    const Configuration c = make_concentric_config(1.0, 2.0, n, 2 * n);
    const SubdomainPartition& p = c.partition;
    const WaveNumber k = WaveNumber::real(1.5);
    const IncidentWave w = IncidentWave::plane(1.5, 0.4);
    const CVec xs = incident_traces(w, p.sigma.curve).stacked();
    const CVec x1 = incident_traces(w, p.gamma[1].curve).stacked();
    const CrossBlock cb = assemble_cross(k, p.sigma_index(), 1, p);
    const CMat t1 = theta_pairing_matrix(p.gamma[1].curve).cast<cplx>();
    const double e = (cb.matrix * xs).norm() / (t1 * x1).norm();
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev <= 0.01);
}

TEST_CASE("eval_potential reproduces a plane wave inside and zero outside") {
  const CurveMesh m = make_circle_mesh(1.0, 256);
  const IncidentWave w = IncidentWave::plane(2.0, 0.5);
  const TraceVec d = incident_traces(w, m);
  const CVec in = eval_potential(WaveNumber::real(2.0), m, d, {{0.3, 0.1}});
  CHECK(std::abs(in(0) - w.value({0.3, 0.1})) <= 0.01);
  const CVec out = eval_potential(WaveNumber::real(2.0), m, d, {{2.0, -1.0}, {0.0, 1.3}});
  CHECK(std::abs(out(0)) <= 0.01);
  CHECK(std::abs(out(1)) <= 0.01);
  const CVec zero = eval_potential(WaveNumber::real(2.0), m, TraceVec::zero(m), {{0.3, 0.1}, {3.0, 0.0}});
  CHECK(zero.norm() == 0.0);
  int near = -1;
  eval_potential(WaveNumber::real(2.0), m, d, {{0.3, 0.1}, {1.0 - 1e-4, 0.0}}, &near);
  CHECK(near == 1);
  CHECK_THROWS_AS(eval_potential(WaveNumber::real(2.0), m, d, {m.vertices[3]}), Error);
}

TEST_CASE("potential gradient matches finite differences") {
  const CurveMesh m = make_circle_mesh(1.0, 64);
  std::mt19937 g(42);
  const TraceVec d{oracle::random_cvec(g, 64), oracle::random_cvec(g, 64)};
  const WaveNumber k = WaveNumber::real(1.2);
  const Point x{0.4, -0.7}, hx{1e-5, 0.0}, hy{0.0, 1e-5};
  const auto gr = eval_potential_gradient(k, m, d, {x});
  const CVec f = eval_potential(k, m, d, {x + hx, x - hx, x + hy, x - hy});
  CHECK(std::abs(gr[0][0] - (f(0) - f(1)) / 2e-5) <= 1e-5 * std::abs(gr[0][0]) + 1e-6);
  CHECK(std::abs(gr[0][1] - (f(2) - f(3)) / 2e-5) <= 1e-5 * std::abs(gr[0][1]) + 1e-6);
}

TEST_CASE("jump relations for random densities") {
  std::mt19937 g(42);
  const WaveNumber k = WaveNumber::real(2.0);
  double prev = 1.0;
  for (int n : {64, 128, 256}) {
    const CurveMesh m = make_circle_mesh(1.0, n);
    const TraceVec d{oracle::random_cvec(g, n), oracle::random_cvec(g, n)};
    const double r = jump_test(k, m, d).residual;
    CHECK(r < prev);
    if (n == 128) CHECK(r <= 0.05);
    prev = r;
  }
  const CurveMesh m = make_circle_mesh(1.0, 64);
  const JumpReport z = jump_test(k, m, TraceVec::zero(m));
  CHECK(z.residual == 0.0);
}
