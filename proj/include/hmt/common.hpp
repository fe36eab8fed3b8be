#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hmt {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr cplx kI{0.0, 1.0};

enum class ErrorKind {
  domain,
  mesh,
  config,
  size_mismatch,
  not_single_trace,
  quadrature,
  singular,
  near_singular,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by the formulation solver when the factorization hits a tiny pivot.
class NearSingularError : public Error {
 public:
  NearSingularError(const std::string& what, double sigma_min)
      : Error(ErrorKind::near_singular, what), sigma_min_(sigma_min) {}
  double sigma_min() const { return sigma_min_; }

 private:
  double sigma_min_;
};

}  // namespace hmt
