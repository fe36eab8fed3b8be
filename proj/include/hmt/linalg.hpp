#pragma once

#include <optional>

#include "hmt/common.hpp"

namespace hmt {

// LU with partial pivoting. Throws Error(singular) naming the first pivot
// below 1e-14 * ||A||_inf.
class LuFactorization {
 public:
  explicit LuFactorization(const CMat& a);

  CVec solve(const CVec& b) const;
  // Solves A^H x = b.
  CVec solve_adjoint(const CVec& b) const;
  int dim() const { return static_cast<int>(lu_.rows()); }
  // max |U_ij| / max |A_ij|
  double growth_factor() const { return growth_; }
  double min_pivot() const { return min_pivot_; }
  double norm_inf() const { return norm_inf_; }

 private:
  Eigen::PartialPivLU<CMat> lu_;
  double growth_ = 1.0;
  double min_pivot_ = 0.0;
  double norm_inf_ = 0.0;
};

struct LuReport {
  double growth_factor = 1.0;
  double relative_residual = 0.0;
};

CVec lu_solve(const CMat& a, const CVec& b, LuReport* report = nullptr);

// Full SVD up to dimension 3000, inverse iteration on A^H A above.
double smallest_singular_value(const CMat& a);

// 1/||A^{-1}||_2 by power iteration on (A^H A)^{-1} using an existing factorization.
double sigma_min_inverse_iteration(const LuFactorization& lu, int max_iter = 200, double tol = 1e-10);

// Smallest singular value of L^{-1} A L^{-H} where gram = L L^H is Hermitian positive definite.
double smallest_singular_value_weighted(const CMat& a, const CMat& gram);

// Smallest and largest singular values, same weighting as above (gram may be empty).
struct SingularRange {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};
SingularRange singular_range(const CMat& a, const CMat* gram = nullptr);

// Smallest eigenvalue of (A + A^H)/2.
double min_eig_hermitian_part(const CMat& a);

struct GmresResult {
  CVec x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

GmresResult gmres(const CMat& a, const CVec& b, double tol = 1e-10, int restart = 50, int max_iter = 1000);

double relative_residual(const CMat& a, const CVec& x, const CVec& b);

}  // namespace hmt
