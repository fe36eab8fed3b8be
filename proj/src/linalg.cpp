#include "hmt/linalg.hpp"

#include <cmath>
#include <string>

namespace hmt {

namespace {

double max_abs(const CMat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

void require_square(const CMat& a, const char* who) {
  if (a.rows() != a.cols())
    throw Error(ErrorKind::size_mismatch, std::string(who) + ": matrix is not square");
}

}  // namespace

LuFactorization::LuFactorization(const CMat& a) {
  require_square(a, "lu");
  norm_inf_ = a.rows() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
  lu_.compute(a);
  const CMat& f = lu_.matrixLU();
  const double tol = 1e-14 * norm_inf_;
  min_pivot_ = std::numeric_limits<double>::infinity();
  double umax = 0.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const double piv = std::abs(f(i, i));
    min_pivot_ = std::min(min_pivot_, piv);
    if (!(piv > tol))
      throw Error(ErrorKind::singular, "lu: pivot " + std::to_string(i) + " below tolerance (|u_ii| = " +
                                            std::to_string(piv) + ")");
    for (Eigen::Index j = i; j < f.cols(); ++j) umax = std::max(umax, std::abs(f(i, j)));
  }
  const double amax = max_abs(a);
  growth_ = amax > 0.0 ? umax / amax : 1.0;
}

CVec LuFactorization::solve(const CVec& b) const {
  if (b.size() != lu_.rows()) throw Error(ErrorKind::size_mismatch, "lu solve: rhs size");
  return lu_.solve(b);
}

CVec LuFactorization::solve_adjoint(const CVec& b) const {
  if (b.size() != lu_.rows()) throw Error(ErrorKind::size_mismatch, "lu solve: rhs size");
  // A = P^T L U  =>  A^H = U^H L^H P
  const CMat& f = lu_.matrixLU();
  CVec y = f.triangularView<Eigen::Upper>().adjoint().solve(b);
  y = f.triangularView<Eigen::UnitLower>().adjoint().solve(y);
  return lu_.permutationP().transpose() * y;
}

double relative_residual(const CMat& a, const CVec& x, const CVec& b) {
  const double nb = b.norm();
  const double nr = (a * x - b).norm();
  return nb > 0.0 ? nr / nb : nr;
}

CVec lu_solve(const CMat& a, const CVec& b, LuReport* report) {
  LuFactorization lu(a);
  CVec x = lu.solve(b);
  if (report) {
    report->growth_factor = lu.growth_factor();
    report->relative_residual = relative_residual(a, x, b);
  }
  return x;
}

double sigma_min_inverse_iteration(const LuFactorization& lu, int max_iter, double tol) {
  const int n = lu.dim();
  if (n == 0) return 0.0;
  // deterministic start vector with all modes present
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(1.0 + 0.37 * std::sin(1.3 * i), 0.23 * std::cos(0.7 * i));
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    CVec w = lu.solve_adjoint(lu.solve(v));
    const double nrm = w.norm();
    if (!(nrm > 0.0)) break;
    const double next = 1.0 / std::sqrt(nrm);
    v = w / nrm;
    if (it > 2 && std::abs(next - est) <= tol * next) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

double smallest_singular_value(const CMat& a) {
  require_square(a, "smallest_singular_value");
  if (a.rows() == 0) return 0.0;
  if (a.rows() <= 3000) {
    Eigen::BDCSVD<CMat> svd(a);
    return svd.singularValues().minCoeff();
  }
  return sigma_min_inverse_iteration(LuFactorization(a));
}

namespace {

CMat whiten(const CMat& a, const CMat& gram) {
  if (gram.rows() != a.rows() || gram.cols() != a.cols())
    throw Error(ErrorKind::size_mismatch, "weighted singular values: gram size");
  Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::singular, "gram matrix is not positive definite");
  const auto l = llt.matrixL();
  CMat t = l.solve(a);                           // L^{-1} A
  CMat s = l.solve(t.adjoint()).adjoint();       // (L^{-1} (L^{-1} A)^H)^H = L^{-1} A L^{-H}
  return s;
}

}  // namespace

double smallest_singular_value_weighted(const CMat& a, const CMat& gram) {
  require_square(a, "smallest_singular_value_weighted");
  return smallest_singular_value(whiten(a, gram));
}

SingularRange singular_range(const CMat& a, const CMat* gram) {
  require_square(a, "singular_range");
  if (a.rows() == 0) return {};
  const CMat s = gram ? whiten(a, *gram) : a;
  Eigen::BDCSVD<CMat> svd(s);
  return {svd.singularValues().minCoeff(), svd.singularValues().maxCoeff()};
}

double min_eig_hermitian_part(const CMat& a) {
  require_square(a, "min_eig_hermitian_part");
  if (a.rows() == 0) return 0.0;
  const CMat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

GmresResult gmres(const CMat& a, const CVec& b, double tol, int restart, int max_iter) {
  require_square(a, "gmres");
  const Eigen::Index n = a.rows();
  GmresResult res;
  res.x = CVec::Zero(n);
  const double nb = b.norm();
  if (nb == 0.0) {
    res.converged = true;
    return res;
  }
  restart = std::max(1, std::min<int>(restart, static_cast<int>(n)));
  while (res.iterations < max_iter) {
    CVec r = b - a * res.x;
    double beta = r.norm();
    res.relative_residual = beta / nb;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    CMat q(n, restart + 1);
    CMat h = CMat::Zero(restart + 1, restart);
    std::vector<cplx> cs(restart), sn(restart);
    CVec g = CVec::Zero(restart + 1);
    g(0) = beta;
    q.col(0) = r / beta;
    int k = 0;
    for (; k < restart && res.iterations < max_iter; ++k, ++res.iterations) {
      CVec w = a * q.col(k);
      for (int i = 0; i <= k; ++i) {
        h(i, k) = q.col(i).dot(w);
        w -= h(i, k) * q.col(i);
      }
      h(k + 1, k) = w.norm();
      if (std::abs(h(k + 1, k)) > 0.0) q.col(k + 1) = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const cplx t = std::conj(cs[i]) * h(i, k) + std::conj(sn[i]) * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      const double den = std::hypot(std::abs(h(k, k)), std::abs(h(k + 1, k)));
      cs[k] = den > 0.0 ? h(k, k) / den : cplx(1.0);
      sn[k] = den > 0.0 ? h(k + 1, k) / den : cplx(0.0);
      h(k, k) = den;
      h(k + 1, k) = 0.0;
      g(k + 1) = -sn[k] * g(k);
      g(k) = std::conj(cs[k]) * g(k);
      if (std::abs(g(k + 1)) / nb <= tol) {
        ++k;
        ++res.iterations;
        break;
      }
    }
    CVec y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    res.x += q.leftCols(k) * y;
  }
  res.relative_residual = relative_residual(a, res.x, b);
  res.converged = res.relative_residual <= tol;
  return res;
}

}  // namespace hmt
