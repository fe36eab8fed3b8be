#pragma once

#include <vector>

#include "hmt/common.hpp"
#include "hmt/formulations.hpp"
#include "hmt/point.hpp"

namespace hmt {

// Transmission by concentric circular layers: zone 0 is r < radii[0], zone i is
// radii[i-1] < r < radii[i], the last zone is the exterior.
class MieSolution {
 public:
  MieSolution(std::vector<double> radii, std::vector<double> wavenumbers, const IncidentWave& wave,
              double tol = 1e-12);

  cplx total(Point x) const;
  cplx scattered(Point x) const;  // exterior only
  int truncation() const { return m_max_; }
  // Coefficients of mode m (|m| <= truncation): inner A, then (B_i, C_i) per annulus, then exterior D.
  const CVec& coefficients(int m) const { return coef_.at(m + m_max_); }
  // Largest residual of the four interface conditions of mode m, relative to the mode scale.
  double interface_residual(int m) const;

 private:
  CVec solve_mode(int m) const;
  cplx incident_coefficient(int m) const;
  double mode_scale(int m, const CVec& c) const;
  int zone(double r) const;

  std::vector<double> radii_;
  std::vector<double> k_;
  IncidentWave wave_;
  double angle_ = 0.0;
  int m_max_ = 0;
  std::vector<CVec> coef_;
};

MieSolution mie_transmission(double a, double b, double k_sigma, double k1, double k0, const IncidentWave& wave,
                             double tol = 1e-12);

// k-th positive zero of J_m.
double bessel_zero(int m, int k);

}  // namespace hmt
