#pragma once

#include "hmt/common.hpp"
#include "hmt/point.hpp"

namespace hmt {

enum class BesselKind { J, Y, K };

// Bessel functions of integer order 0..60 for real argument.
double bessel(BesselKind kind, int order, double x);

// H_m^(1)(x) = J_m(x) + i Y_m(x), x > 0.
cplx hankel1(int order, double x);

// Orders 0 and 1 in one pass; used by the kernels.
void bessel_jy01(double x, double& j0, double& j1, double& y0, double& y1);
void bessel_k01(double x, double& k0, double& k1);

// Wavenumber restricted to the positive real axis or the positive imaginary axis.
class WaveNumber {
 public:
  static WaveNumber real(double k);
  static WaveNumber imaginary(double t);
  WaveNumber() = default;

  bool is_real() const { return real_; }
  // k for real wavenumbers, t for k = i t.
  double magnitude() const { return mag_; }
  cplx value() const { return real_ ? cplx(mag_, 0.0) : cplx(0.0, mag_); }
  // k^2 as a complex number (negative for the imaginary axis).
  double squared() const { return real_ ? mag_ * mag_ : -mag_ * mag_; }

 private:
  WaveNumber(bool r, double m) : real_(r), mag_(m) {}
  bool real_ = true;
  double mag_ = 1.0;
};

// Radial Green function value and its r-derivative.
struct RadialKernel {
  cplx g;
  cplx dg;  // dG/dr
};

RadialKernel radial_kernel(const WaveNumber& k, double r);

// G(r) + ln(r)/(2 pi); bounded as r -> 0.
cplx green_remainder(const WaveNumber& k, double r);

struct KernelEval {
  cplx value;
  cplx gradient_dot_normal;
};

// G_k(r): (i/4) H0(k r) for real k, K0(t r)/(2 pi) for k = i t.
cplx green_kernel(const WaveNumber& k, double r);

// n_y . (grad G)(x - y).
cplx dl_kernel(const WaveNumber& k, const Point& x, const Point& y, const Point& n_y);

// Value of G(x-y) together with n . (grad G)(x - y).
KernelEval kernel_eval(const WaveNumber& k, const Point& x, const Point& y, const Point& n);

}  // namespace hmt
