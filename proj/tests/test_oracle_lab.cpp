#include <cmath>

#include "doctest.h"
#include "hmt/mie.hpp"
#include "hmt/studies.hpp"
#include "oracles.hpp"

using namespace hmt;

namespace {

// incident coefficient in the order-|m| basis
cplx incident_mode(const IncidentWave& w, double angle, int m) {
  const double sgn = (m < 0 && (-m) % 2) ? -1.0 : 1.0;
  return sgn * w.amplitude * std::pow(cplx(0.0, 1.0), m) * std::exp(cplx(0.0, -m * angle));
}

OwnedProblem concentric(int level, double k0, double k1, double ks) {
  const int n = 16 << level;
  Problem pr;
  pr.medium = MediumField::constant(ks);
  pr.kappa = {WaveNumber::real(k0), WaveNumber::real(k1)};
  pr.wave = IncidentWave::plane(k0, 0.0);
  return own(make_concentric_config(1.0, 2.0, n, 2 * n, 2.0 * kPi / n), pr);
}

}  // namespace

TEST_CASE("homogeneous medium: no scattered field") {
  const IncidentWave w = IncidentWave::plane(1.4, 0.7, cplx(0.8, -0.3));
  const MieSolution mie = mie_transmission(1.0, 2.0, 1.4, 1.4, 1.4, w);
  for (int i = 0; i < 24; ++i) {
    const double t = 2.0 * kPi * i / 24;
    for (double r : {0.3, 1.5, 2.5, 6.0}) {
      const Point x{r * std::cos(t), r * std::sin(t)};
      CHECK(std::abs(mie.total(x) - w.value(x)) <= 1e-10);
      if (r > 2.0) CHECK(std::abs(mie.scattered(x)) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(mie.scattered({0.5, 0.0}), Error);
}

TEST_CASE("continuity across both interfaces") {
  const IncidentWave w = IncidentWave::plane(1.0, 0.2);
  const MieSolution mie = mie_transmission(1.0, 2.0, 3.0, 1.5, 1.0, w);
  for (double a : {1.0, 2.0}) {
    double worst = 0.0;
    for (int i = 0; i < 32; ++i) {
      const double t = 2.0 * kPi * i / 32;
      const Point e{std::cos(t), std::sin(t)};
      worst = std::max(worst, std::abs(mie.total((a * (1 - 1e-12)) * e) - mie.total((a * (1 + 1e-12)) * e)));
    }
    CHECK(worst <= 1e-9);
  }
  for (int m = -mie.truncation(); m <= mie.truncation(); ++m) CHECK(mie.interface_residual(m) <= 1e-9);
}

TEST_CASE("energy balance of the exterior coefficients") {
  const IncidentWave w = IncidentWave::plane(1.2, 0.4);
  const MieSolution mie = mie_transmission(1.0, 2.0, 2.7, 0.9, 1.2, w);
  double sum = 0.0, scale = 0.0;
  for (int m = -mie.truncation(); m <= mie.truncation(); ++m) {
    const CVec& c = mie.coefficients(m);
    const cplx d = c(c.size() - 1), a = incident_mode(w, 0.4, m);
    sum += std::norm(d) + (std::conj(a) * d).real();
    scale += std::norm(d);
  }
  CHECK(scale > 1e-3);
  CHECK(std::abs(sum) <= 1e-8 * scale);

  // the coefficients describe the scattered field returned by the oracle
  const Point x{2.6, -1.1};
  const double r = norm(x), t = std::atan2(x.y, x.x);
  cplx s = 0.0;
  for (int m = -mie.truncation(); m <= mie.truncation(); ++m) {
    const CVec& c = mie.coefficients(m);
    s += c(c.size() - 1) * hankel1(std::abs(m), 1.2 * r) * std::exp(cplx(0.0, m * t));
  }
  CHECK(std::abs(s - mie.scattered(x)) <= 1e-12);
}

TEST_CASE("mode truncation is converged") {
  const IncidentWave w = IncidentWave::plane(2.0, 0.0);
  const MieSolution a = mie_transmission(1.0, 2.0, 3.0, 1.5, 2.0, w, 1e-12);
  const MieSolution b = mie_transmission(1.0, 2.0, 3.0, 1.5, 2.0, w, 1e-16);
  CHECK(b.truncation() >= a.truncation() + 2);
  double worst = 0.0;
  for (const Point& x : probe_circle(3.0, 64)) worst = std::max(worst, std::abs(a.total(x) - b.total(x)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("single-layer oracle") {
  // one interface: the disk case used by the resonance experiments
  const IncidentWave w = IncidentWave::plane(2.0, 0.0);
  const MieSolution one({1.0}, {1.7, 2.0}, w);
  const MieSolution two = mie_transmission(0.5, 1.0, 1.7, 1.7, 2.0, w);
  for (const Point& x : probe_circle(3.0, 16)) CHECK(std::abs(one.total(x) - two.total(x)) <= 1e-10);
  CHECK_THROWS_AS(MieSolution({1.0}, {1.7, 2.5}, w), Error);
}

TEST_CASE("Bessel zeros") {
  CHECK(std::abs(bessel_zero(0, 1) - 2.404825557695773) <= 1e-12);
  CHECK(std::abs(bessel_zero(1, 1) - 3.8317059702075125) <= 1e-12);
  CHECK(std::abs(bessel_zero(2, 3) - 11.619841172149059) <= 1e-12);
  for (int m : {0, 1, 3, 7})
    for (int k : {1, 2, 4}) {
      const double z = bessel_zero(m, k);
      CHECK(std::abs(bessel(BesselKind::J, m, z)) <= 1e-12);
      // root of the series with 60 and with 120 terms
      const double lo = z - 0.05, hi = z + 0.05;
      const double z60 = oracle::bisect([m](double x) { return oracle::bessel_j_series(m, x, 60); }, lo, hi);
      const double z120 = oracle::bisect([m](double x) { return oracle::bessel_j_series(m, x, 120); }, lo, hi);
      CHECK(std::abs(z60 - z) <= 1e-12);
      CHECK(std::abs(z120 - z) <= 1e-12);
    }
  CHECK(bessel_zero(0, 2) > bessel_zero(0, 1));
  CHECK_THROWS_AS(bessel_zero(0, 0), Error);
}

TEST_CASE("linspace and probe circle") {
  const auto g = linspace(1.0, 2.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 2.0);
  CHECK(g[2] == doctest::Approx(1.5).epsilon(1e-15));
  const auto p = probe_circle(3.0, 8);
  CHECK(p.size() == 8);
  CHECK(p[0].x == 3.0);
  CHECK(std::abs(norm(p[5]) - 3.0) <= 1e-15);
  CVec a(2), b(2);
  a << 1.0, 2.0;
  b << 1.0, 1.0;
  CHECK(relative_l2(a, b) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("sweep rows follow the grid and never solve") {
  auto build = [](double k0) {
    Problem pr;
    pr.medium = MediumField::constant(1.7);
    pr.kappa = {WaveNumber::real(k0)};
    pr.wave = IncidentWave::plane(k0, 0.0);
    return own(make_disk_config(1.0, 32, 0.3), pr);
  };
  // costabel at the first Dirichlet eigenvalue of the disk
  const std::vector<double> grid{2.3, bessel_zero(0, 1), 2.5};
  const auto rows = sweep_sigma_min(FormulationKind::costabel, build, grid);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].k0 == grid[i]);
    CHECK(rows[i].kind == FormulationKind::costabel);
    CHECK(rows[i].sigma_min > 0.0);
    CHECK(rows[i].sigma_min_energy > 0.0);
    CHECK(rows[i].condition >= 1.0);
  }
  SweepOptions plain;
  plain.energy_norm = false;
  const auto p = sweep_sigma_min(FormulationKind::cmtf, build, {2.3}, plain);
  CHECK(p.size() == 1);
}

TEST_CASE("convergence study on the concentric configuration") {
  const MieSolution mie = mie_transmission(1.0, 2.0, 1.5, 2.0, 1.0, IncidentWave::plane(1.0, 0.0));
  ConvergenceOptions opt;
  opt.probe_angles = 64;
  const auto rows = convergence_study(
      FormulationKind::stf, [](int l) { return concentric(l, 1.0, 2.0, 1.5); }, 3, [&](Point x) { return mie.total(x); },
      opt);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].order == 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].error < rows[i - 1].error);
    CHECK(rows[i].h < rows[i - 1].h);
    CHECK(rows[i].dofs > rows[i - 1].dofs);
  }
  CHECK(std::abs(rows.back().order - 2.0) <= 0.5);
}

TEST_CASE("identical media: discretization error only") {
  // the scattered field vanishes, so what remains is the FEM/BEM discretization error of the incident wave
  const IncidentWave w = IncidentWave::plane(1.0, 0.0);
  ConvergenceOptions opt;
  opt.probe_angles = 64;
  const auto rows = convergence_study(
      FormulationKind::stf, [](int l) { return concentric(l, 1.0, 1.0, 1.0); }, 3, [&](Point x) { return w.value(x); },
      opt);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].error < rows[i - 1].error);
  CHECK(rows.back().error <= 1e-3);
}

TEST_CASE("identical media: error at most 1e-6 at every level" * doctest::should_fail()) {
  const IncidentWave w = IncidentWave::plane(1.0, 0.0);
  ConvergenceOptions opt;
  opt.probe_angles = 64;
  const auto rows = convergence_study(
      FormulationKind::stf, [](int l) { return concentric(l, 1.0, 1.0, 1.0); }, 3, [&](Point x) { return w.value(x); },
      opt);
  for (const auto& r : rows) CHECK(r.error <= 1e-6);
}
