#include "hmt/mie.hpp"

#include <cmath>

#include "hmt/linalg.hpp"
#include "hmt/special_functions.hpp"

namespace hmt {

namespace {

constexpr int kMaxOrder = 59;  // derivatives need order m + 1 <= 60

struct Radial {
  cplx f, df;  // value and d/dr at given r
};

double jn(int m, double x) { return bessel(BesselKind::J, m, x); }
double yn(int m, double x) { return bessel(BesselKind::Y, m, x); }

// J_m(k r) and its r-derivative, m >= 0
Radial radial_j(int m, double k, double r) {
  const double x = k * r;
  const double d = m == 0 ? -jn(1, x) : 0.5 * (jn(m - 1, x) - jn(m + 1, x));
  return {jn(m, x), k * d};
}

Radial radial_y(int m, double k, double r) {
  const double x = k * r;
  const double d = m == 0 ? -yn(1, x) : 0.5 * (yn(m - 1, x) - yn(m + 1, x));
  return {yn(m, x), k * d};
}

Radial radial_h(int m, double k, double r) {
  const Radial j = radial_j(m, k, r), y = radial_y(m, k, r);
  return {j.f + kI * y.f, j.df + kI * y.df};
}

}  // namespace

MieSolution::MieSolution(std::vector<double> radii, std::vector<double> wavenumbers, const IncidentWave& wave,
                         double tol)
    : radii_(std::move(radii)), k_(std::move(wavenumbers)), wave_(wave) {
  if (radii_.empty() || k_.size() != radii_.size() + 1)
    throw Error(ErrorKind::config, "mie: need one wavenumber per zone");
  for (std::size_t i = 0; i < radii_.size(); ++i)
    if (!(radii_[i] > 0.0) || (i > 0 && !(radii_[i] > radii_[i - 1])))
      throw Error(ErrorKind::config, "mie: radii must be positive and increasing");
  for (double k : k_)
    if (!(k > 0.0)) throw Error(ErrorKind::config, "mie: wavenumbers must be positive");
  if (std::abs(k_.back() - wave.k0) > 1e-14 * wave.k0)
    throw Error(ErrorKind::config, "mie: exterior wavenumber differs from the incident one");
  angle_ = std::atan2(wave.direction.y, wave.direction.x);
  // modes until two consecutive ones fall below tol relative to the largest scale seen
  std::vector<CVec> pos;
  double peak = 0.0;
  int small = 0;
  int m = 0;
  for (; m <= kMaxOrder; ++m) {
    pos.push_back(solve_mode(m));
    const double s = mode_scale(m, pos.back());
    peak = std::max(peak, s);
    small = s <= tol * peak ? small + 1 : 0;
    if (small >= 2 && m >= 5) break;
  }
  if (m > kMaxOrder) throw Error(ErrorKind::quadrature, "mie: mode series did not converge by order 59");
  m_max_ = m;
  coef_.resize(2 * m_max_ + 1);
  for (int q = -m_max_; q <= m_max_; ++q) coef_[q + m_max_] = solve_mode(q);
}

cplx MieSolution::incident_coefficient(int m) const {
  // e^{i k r cos(phi - alpha)} = sum_m i^m J_m(k r) e^{i m (phi - alpha)}
  return wave_.amplitude * std::pow(kI, m) * std::exp(-kI * (double(m) * angle_));
}

CVec MieSolution::solve_mode(int m) const {
  const int am = std::abs(m);
  // J_{-m} = (-1)^m J_m for every cylinder function, so order |m| serves both signs
  const double sgn = (m < 0 && am % 2) ? -1.0 : 1.0;
  const int nl = static_cast<int>(radii_.size());
  const int nu = 2 * nl;
  CMat a = CMat::Zero(nu, nu);
  CVec rhs = CVec::Zero(nu);
  // unknown columns: 0 -> inner J, 1 + 2(i-1), 2 + 2(i-1) -> annulus i (J, Y), nu-1 -> exterior H
  for (int i = 0; i < nl; ++i) {
    const double r = radii_[i];
    const int row = 2 * i;
    // inside of interface i: zone i
    if (i == 0) {
      const Radial j = radial_j(am, k_[0], r);
      a(row, 0) += j.f;
      a(row + 1, 0) += j.df;
    } else {
      const Radial j = radial_j(am, k_[i], r), y = radial_y(am, k_[i], r);
      const int c = 1 + 2 * (i - 1);
      a(row, c) += j.f;
      a(row + 1, c) += j.df;
      a(row, c + 1) += y.f;
      a(row + 1, c + 1) += y.df;
    }
    // outside: zone i + 1
    if (i == nl - 1) {
      const Radial h = radial_h(am, k_[nl], r), j = radial_j(am, k_[nl], r);
      a(row, nu - 1) -= h.f;
      a(row + 1, nu - 1) -= h.df;
      const cplx c = sgn * incident_coefficient(m);
      rhs(row) += c * j.f;
      rhs(row + 1) += c * j.df;
    } else {
      const Radial j = radial_j(am, k_[i + 1], r), y = radial_y(am, k_[i + 1], r);
      const int c = 1 + 2 * i;
      a(row, c) -= j.f;
      a(row + 1, c) -= j.df;
      a(row, c + 1) -= y.f;
      a(row + 1, c + 1) -= y.df;
    }
  }
  // high orders mix tiny J with huge Y; equilibrate columns then rows first
  RVec cs(nu), rs(nu);
  for (int c = 0; c < nu; ++c) {
    cs(c) = a.col(c).cwiseAbs().maxCoeff();
    if (cs(c) > 0.0) a.col(c) /= cs(c);
  }
  for (int r = 0; r < nu; ++r) {
    rs(r) = a.row(r).cwiseAbs().maxCoeff();
    if (rs(r) > 0.0) {
      a.row(r) /= rs(r);
      rhs(r) /= rs(r);
    }
  }
  try {
    CVec x = lu_solve(a, rhs);
    for (int c = 0; c < nu; ++c)
      if (cs(c) > 0.0) x(c) /= cs(c);
    return x;
  } catch (const Error& e) {
    throw Error(ErrorKind::singular, "mie: near-singular system for mode " + std::to_string(m));
  }
}

double MieSolution::mode_scale(int m, const CVec& c) const {
  // largest field magnitude of this mode on the interfaces
  const int am = std::abs(m);
  const int nl = static_cast<int>(radii_.size());
  double s = std::abs(c(0) * radial_j(am, k_[0], radii_[0]).f);
  for (int i = 1; i < nl; ++i) {
    const int col = 1 + 2 * (i - 1);
    for (double r : {radii_[i - 1], radii_[i]})
      s = std::max(s, std::abs(c(col) * radial_j(am, k_[i], r).f + c(col + 1) * radial_y(am, k_[i], r).f));
  }
  s = std::max(s, std::abs(c(2 * nl - 1) * radial_h(am, k_[nl], radii_.back()).f));
  s = std::max(s, std::abs(incident_coefficient(m) * radial_j(am, k_[nl], radii_.back()).f));
  return s;
}

int MieSolution::zone(double r) const {
  for (std::size_t i = 0; i < radii_.size(); ++i)
    if (r < radii_[i]) return static_cast<int>(i);
  return static_cast<int>(radii_.size());
}

cplx MieSolution::total(Point x) const {
  const double r = norm(x), phi = std::atan2(x.y, x.x);
  const int z = zone(r);
  const int nl = static_cast<int>(radii_.size());
  // the incident part is summed in closed form; a truncated series would lose accuracy far out
  if (z == nl) return wave_.value(x) + scattered(x);
  cplx s = 0.0;
  for (int m = -m_max_; m <= m_max_; ++m) {
    const CVec& c = coef_[m + m_max_];
    const int am = std::abs(m);
    cplx v;
    if (z == 0) {
      v = c(0) * jn(am, k_[0] * r);
    } else {
      const int col = 1 + 2 * (z - 1);
      v = c(col) * jn(am, k_[z] * r) + c(col + 1) * yn(am, k_[z] * r);
    }
    s += v * std::exp(kI * (double(m) * phi));
  }
  return s;
}

cplx MieSolution::scattered(Point x) const {
  const double r = norm(x), phi = std::atan2(x.y, x.x);
  if (zone(r) != static_cast<int>(radii_.size())) throw Error(ErrorKind::domain, "scattered field is exterior only");
  const int nl = static_cast<int>(radii_.size());
  cplx s = 0.0;
  for (int m = -m_max_; m <= m_max_; ++m) {
    const int am = std::abs(m);
    s += coef_[m + m_max_](2 * nl - 1) * radial_h(am, k_[nl], r).f * std::exp(kI * (double(m) * phi));
  }
  return s;
}

double MieSolution::interface_residual(int m) const {
  const CVec& c = coefficients(m);
  const int am = std::abs(m);
  const double sgn = (m < 0 && am % 2) ? -1.0 : 1.0;
  const int nl = static_cast<int>(radii_.size());
  auto zone_field = [&](int z, double r) -> Radial {
    if (z == 0) {
      const Radial j = radial_j(am, k_[0], r);
      return {c(0) * j.f, c(0) * j.df};
    }
    if (z < nl) {
      const int col = 1 + 2 * (z - 1);
      const Radial j = radial_j(am, k_[z], r), y = radial_y(am, k_[z], r);
      return {c(col) * j.f + c(col + 1) * y.f, c(col) * j.df + c(col + 1) * y.df};
    }
    const Radial j = radial_j(am, k_[nl], r), h = radial_h(am, k_[nl], r);
    const cplx ci = sgn * incident_coefficient(m);
    return {ci * j.f + c(2 * nl - 1) * h.f, ci * j.df + c(2 * nl - 1) * h.df};
  };
  double worst = 0.0;
  for (int i = 0; i < nl; ++i) {
    const Radial in = zone_field(i, radii_[i]), out = zone_field(i + 1, radii_[i]);
    const double scale = std::max({std::abs(in.f), std::abs(out.f), 1e-300});
    worst = std::max(worst, std::abs(in.f - out.f) / scale);
    const double dscale = std::max({std::abs(in.df), std::abs(out.df), 1e-300});
    worst = std::max(worst, std::abs(in.df - out.df) / dscale);
  }
  return worst;
}

MieSolution mie_transmission(double a, double b, double k_sigma, double k1, double k0, const IncidentWave& wave,
                             double tol) {
  return MieSolution({a, b}, {k_sigma, k1, k0}, wave, tol);
}

double bessel_zero(int m, int k) {
  if (m < 0 || m > 20 || k < 1 || k > 10) throw Error(ErrorKind::domain, "bessel_zero needs 0 <= m <= 20, 1 <= k <= 10");
  auto f = [m](double x) { return jn(m, x); };
  // scan for sign changes; zeros of J_m are at least pi apart asymptotically and > 2 apart always
  const double step = 0.05;
  double x0 = m == 0 ? step : static_cast<double>(m);
  double f0 = f(x0);
  int found = 0;
  for (double x1 = x0 + step;; x1 += step) {
    const double f1 = f(x1);
    if (f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
      if (++found == k) {
        double lo = x0, hi = x1, flo = f0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = f(mid);
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 3; ++it) {
          const double d = (m == 0 ? -jn(1, x) : jn(m - 1, x) - m / x * jn(m, x));
          if (d == 0.0) break;
          const double nx = x - f(x) / d;
          if (!(nx > lo - 1e-12 && nx < hi + 1e-12)) break;
          x = nx;
        }
        return x;
      }
    }
    x0 = x1;
    f0 = f1;
  }
}

}  // namespace hmt
