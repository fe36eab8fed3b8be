#include "hmt/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hmt {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::mesh: return "mesh error";
    case ErrorKind::config: return "config error";
    case ErrorKind::size_mismatch: return "size mismatch";
    case ErrorKind::not_single_trace: return "not a single-trace vector";
    case ErrorKind::quadrature: return "quadrature failure";
    case ErrorKind::singular: return "singular matrix";
    case ErrorKind::near_singular: return "near-singular";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

namespace {

constexpr int kMaxOrder = 60;

// Power series for J0, J1, Y0, Y1. T = long double keeps the cancellation
// error small up to x ~ 20.
template <typename T>
void jy01_series(T x, double& j0, double& j1, double& y0, double& y1) {
  const T z = x * x / 4;
  const T pi = static_cast<T>(kPi);
  const T eps = std::numeric_limits<T>::epsilon();
  T t0 = 1;  // (-z)^k / (k!)^2
  T t1 = 1;  // (-z)^k / (k! (k+1)!)
  T sj0 = 1, sj1 = 1;
  T harm = 0;  // H_k
  T sy0 = 0;
  // psi(k+1) + psi(k+2) = H_k + H_{k+1} - 2 gamma
  const T g = static_cast<T>(kEulerGamma);
  T sy1 = (0 + 1) - 2 * g;
  for (int k = 1; k < 200; ++k) {
    t0 *= -z / (T(k) * T(k));
    t1 *= -z / (T(k) * T(k + 1));
    harm += T(1) / T(k);
    const T harm_next = harm + T(1) / T(k + 1);
    sj0 += t0;
    sj1 += t1;
    sy0 += harm * t0;
    sy1 += (harm + harm_next - 2 * g) * t1;
    if (T(k) > z && std::abs(t0) * (1 + harm) < eps * std::abs(sj0) * 1e-2 &&
        std::abs(t1) * (1 + harm) < eps * std::abs(sj1) * 1e-2)
      break;
  }
  const T lg = std::log(x / 2);
  const T J0 = sj0;
  const T J1 = x / 2 * sj1;
  j0 = static_cast<double>(J0);
  j1 = static_cast<double>(J1);
  y0 = static_cast<double>(2 / pi * (lg + g) * J0 - 2 / pi * sy0);
  y1 = static_cast<double>(-2 / (pi * x) + 2 / pi * lg * J1 - x / (2 * pi) * sy1);
}

// Hankel asymptotic expansion, accurate to ~1e-16 for x >= 20.
void jy_asymptotic(int nu, double x, double& j, double& y) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0;
  double t = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    t *= (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(t) > prev) break;
    prev = std::abs(t);
    switch (k % 4) {
      case 1: q += t; break;
      case 2: p -= t; break;
      case 3: q -= t; break;
      case 0: p += t; break;
    }
    if (std::abs(t) < 1e-18) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  const double amp = std::sqrt(2.0 / (kPi * x));
  const double c = std::cos(chi), s = std::sin(chi);
  j = amp * (p * c - q * s);
  y = amp * (p * s + q * c);
}

double bessel_j_miller(int m, double x) {
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  const double big = std::max<double>(m, x);
  int start = static_cast<int>(big + 20.0 + std::sqrt(160.0 * big));
  start += start % 2;
  double jp = 0.0;  // j_{k+1}
  double jk = 1e-30;  // j_k
  double result = 0.0;
  double sum = 0.0;
  for (int k = start; k >= 1; --k) {
    const double jm = (2.0 * k / x) * jk - jp;  // j_{k-1}
    jp = jk;
    jk = jm;
    if (std::abs(jk) > 1e250) {
      jk *= 1e-250;
      jp *= 1e-250;
      result *= 1e-250;
      sum *= 1e-250;
    }
    // jk now holds j_{k-1}
    if (k - 1 == m) result = jk;
    if ((k - 1) % 2 == 0 && k - 1 > 0) sum += 2.0 * jk;
  }
  sum += jk;  // j_0
  return result / sum;
}

void k01_series(double x, double& k0, double& k1) {
  const double z = x * x / 4.0;
  double t0 = 1.0, t1 = 1.0;
  double si0 = 1.0, si1 = 1.0;
  double harm = 0.0;
  double sk0 = 0.0;
  double sk1 = 1.0 - 2.0 * kEulerGamma;
  for (int k = 1; k < 100; ++k) {
    t0 *= z / (double(k) * k);
    t1 *= z / (double(k) * (k + 1));
    harm += 1.0 / k;
    const double harm_next = harm + 1.0 / (k + 1);
    si0 += t0;
    si1 += t1;
    sk0 += harm * t0;
    sk1 += (harm + harm_next - 2.0 * kEulerGamma) * t1;
    if (t0 * (1 + harm) < 1e-18 * si0 && t1 * (1 + harm) < 1e-18 * si1) break;
  }
  const double lg = std::log(x / 2.0);
  const double i0 = si0;
  const double i1 = x / 2.0 * si1;
  k0 = -(lg + kEulerGamma) * i0 + sk0;
  k1 = 1.0 / x + lg * i1 - x / 4.0 * sk1;
}

// Steed's continued fraction (Temme) for K0, K1 at x > 2.
void k01_continued_fraction(double x, double& k0, double& k1) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= 20000; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h = a1 * h;
  k0 = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

void check_order(int order) {
  if (order < 0 || order > kMaxOrder)
    throw Error(ErrorKind::domain, "bessel order " + std::to_string(order) + " outside 0..60");
}

}  // namespace

void bessel_jy01(double x, double& j0, double& j1, double& y0, double& y1) {
  if (!(x > 0.0)) throw Error(ErrorKind::domain, "bessel_jy01 requires x > 0");
  if (x < 8.0) {
    jy01_series<double>(x, j0, j1, y0, y1);
  } else if (x < 20.0) {
    jy01_series<long double>(static_cast<long double>(x), j0, j1, y0, y1);
  } else {
    jy_asymptotic(0, x, j0, y0);
    jy_asymptotic(1, x, j1, y1);
  }
}

void bessel_k01(double x, double& k0, double& k1) {
  if (!(x > 0.0)) throw Error(ErrorKind::domain, "bessel_k01 requires x > 0");
  if (x <= 2.0)
    k01_series(x, k0, k1);
  else
    k01_continued_fraction(x, k0, k1);
}

double bessel(BesselKind kind, int order, double x) {
  check_order(order);
  if (!std::isfinite(x)) throw Error(ErrorKind::domain, "bessel argument not finite");
  switch (kind) {
    case BesselKind::J: {
      if (x < 0.0) {
        const double v = bessel_j_miller(order, -x);
        return order % 2 == 0 ? v : -v;
      }
      return bessel_j_miller(order, x);
    }
    case BesselKind::Y: {
      if (!(x > 0.0)) throw Error(ErrorKind::domain, "Y_m requires x > 0");
      double j0, j1, y0, y1;
      bessel_jy01(x, j0, j1, y0, y1);
      if (order == 0) return y0;
      double ym = y0, yk = y1;
      for (int k = 1; k < order; ++k) {
        const double next = (2.0 * k / x) * yk - ym;
        ym = yk;
        yk = next;
      }
      if (!std::isfinite(yk)) throw Error(ErrorKind::domain, "Y_m overflow");
      return yk;
    }
    case BesselKind::K: {
      if (!(x > 0.0)) throw Error(ErrorKind::domain, "K_m requires x > 0");
      double k0, k1;
      bessel_k01(x, k0, k1);
      if (order == 0) return k0;
      double km = k0, kk = k1;
      for (int k = 1; k < order; ++k) {
        const double next = (2.0 * k / x) * kk + km;
        km = kk;
        kk = next;
        if (!std::isfinite(kk)) throw Error(ErrorKind::domain, "K_m overflow at order " + std::to_string(order));
      }
      if (!std::isfinite(kk)) throw Error(ErrorKind::domain, "K_m overflow");
      return kk;
    }
  }
  return 0.0;
}

cplx hankel1(int order, double x) {
  check_order(order);
  if (!(x > 0.0)) throw Error(ErrorKind::domain, "hankel1 requires x > 0");
  return {bessel(BesselKind::J, order, x), bessel(BesselKind::Y, order, x)};
}

WaveNumber WaveNumber::real(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorKind::domain, "real wavenumber must be > 0");
  return WaveNumber(true, k);
}

WaveNumber WaveNumber::imaginary(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::domain, "imaginary wavenumber i*t needs t > 0");
  return WaveNumber(false, t);
}

RadialKernel radial_kernel(const WaveNumber& k, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::domain, "Green kernel needs r > 0");
  const double s = k.magnitude();
  if (k.is_real()) {
    double j0, j1, y0, y1;
    bessel_jy01(s * r, j0, j1, y0, y1);
    const cplx h0(j0, y0), h1(j1, y1);
    return {0.25 * kI * h0, -0.25 * kI * s * h1};
  }
  double k0, k1;
  bessel_k01(s * r, k0, k1);
  return {cplx(k0 / (2.0 * kPi), 0.0), cplx(-s * k1 / (2.0 * kPi), 0.0)};
}

cplx green_remainder(const WaveNumber& k, double r) {
  return radial_kernel(k, r).g + std::log(r) / (2.0 * kPi);
}

cplx green_kernel(const WaveNumber& k, double r) { return radial_kernel(k, r).g; }

cplx dl_kernel(const WaveNumber& k, const Point& x, const Point& y, const Point& n_y) {
  const Point d = x - y;
  const double r = norm(d);
  if (!(r > 0.0)) throw Error(ErrorKind::domain, "dl_kernel needs x != y");
  return radial_kernel(k, r).dg * (dot(n_y, d) / r);
}

KernelEval kernel_eval(const WaveNumber& k, const Point& x, const Point& y, const Point& n) {
  const Point d = x - y;
  const double r = norm(d);
  if (!(r > 0.0)) throw Error(ErrorKind::domain, "kernel evaluation needs x != y");
  const RadialKernel rk = radial_kernel(k, r);
  return {rk.g, rk.dg * (dot(n, d) / r)};
}

}  // namespace hmt
