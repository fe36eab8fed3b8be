#include <cmath>

#include "doctest.h"
#include "hmt/regularizer.hpp"
#include "oracles.hpp"

using namespace hmt;

namespace {

// Hermitian matrix of phi -> Im <M phi, conj phi> = phi^H B (S + Mm)^{-1} B^T phi
RMat im_form(const RegularizerM& m) { return (m.mixed() * m.matrix()).imag(); }

}  // namespace

TEST_CASE("Im <M phi, conj phi> > 0 for random phi") {
  std::mt19937 g(42);
  const CurveMesh s = make_circle_mesh(1.0, 64);
  const RegularizerM m = assemble_M(s);
  for (int i = 0; i < 100; ++i) {
    const CVec phi = oracle::random_cvec(g, 64);
    const cplx v = phi.adjoint() * (m.mixed().cast<cplx>() * m.apply(phi));
    CHECK(v.imag() > 0.0);
    CHECK(std::abs(v.real()) <= 1e-12 * v.imag());
  }
}

TEST_CASE("the Im form is positive definite on odd Sigma meshes") {
  for (int n : {33, 63}) {
    const RegularizerM m = assemble_M(make_circle_mesh(1.0, n));
    const RMat f = im_form(m);
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (f + f.transpose()));
    CHECK(es.eigenvalues().minCoeff() > 1e-8);
  }
}

TEST_CASE("the Im form is positive definite on the 64-panel Sigma" * doctest::should_fail()) {
  // B^T annihilates the alternating P0 vector on even cycles, so phi^H B S^-1 B^T phi
  // has an exact null direction there
  const RegularizerM m = assemble_M(make_circle_mesh(1.0, 64));
  const RMat f = im_form(m);
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (f + f.transpose()));
  CHECK(es.eigenvalues().minCoeff() > 1e-8);
}

TEST_CASE("even Sigma meshes: the null direction is the alternating vector") {
  const RegularizerM m = assemble_M(make_circle_mesh(1.0, 64));
  CVec alt(64);
  for (int k = 0; k < 64; ++k) alt(k) = k % 2 ? -1.0 : 1.0;
  CHECK(m.apply(alt).norm() <= 1e-12);
}

TEST_CASE("M of the constant is i") {
  for (int n : {16, 64, 101}) {
    const RegularizerM m = assemble_M(make_circle_mesh(1.0, n));
    const CVec w = m.apply(CVec::Ones(n));
    CHECK((w - kI * CVec::Ones(n)).norm() <= 1e-12 * std::sqrt(double(n)));
  }
}

TEST_CASE("M is symmetric under the Sigma duality") {
  std::mt19937 g(42);
  const CurveMesh s = make_circle_mesh(1.2, 48);
  const RegularizerM m = assemble_M(s);
  for (int i = 0; i < 20; ++i) {
    const CVec p = oracle::random_cvec(g, 48), q = oracle::random_cvec(g, 48);
    const cplx a = dual_pairing(s, m.apply(q), p), b = dual_pairing(s, m.apply(p), q);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
  CHECK_THROWS_AS(m.apply(CVec::Zero(47)), Error);
}

TEST_CASE("apply_M_star") {
  std::mt19937 g(42);
  for (int n : {32, 33}) {
    const CurveMesh s = make_circle_mesh(1.0, n);
    const RegularizerM m = assemble_M(s);
    const CVec p = oracle::random_cvec(g, n);
    const CVec ms = apply_M_star(m, p);
    // defining relation <M* p, q> = <M q, p> for all q
    for (int i = 0; i < 5; ++i) {
      const CVec q = oracle::random_cvec(g, n);
      const cplx lhs = dual_pairing(s, ms, q), rhs = dual_pairing(s, m.apply(q), p);
      CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(rhs));
    }
    if (n % 2) CHECK((ms - m.apply(p)).norm() <= 1e-10 * ms.norm());
  }
}

TEST_CASE("the trace transformation C") {
  std::mt19937 g(42);
  for (const Configuration& c : {make_halfdisk_config(1.0, 2.0, 16), make_concentric_config(1.0, 2.0, 16, 24),
                                 make_disk_config(1.0, 20)}) {
    const SubdomainPartition& p = c.partition;
    const SingleTraceDofMap map(p);
    const RegularizerM m = assemble_M(p.sigma.curve);
    const ExtensionMap ext(p);
    const CMat cf = assemble_C_free(map, m, ext);
    CHECK((cf * cf).norm() == 0.0);
    const CMat id = CMat::Identity(map.size(), map.size());
    CHECK(((id + cf) * (id - cf) - id).norm() <= 1e-13);

    const int nvs = p.sigma.curve.num_vertices(), nps = p.sigma.curve.num_panels();
    const CMat tr = map.trace_sigma_matrix().cast<cplx>();
    const CVec f = oracle::random_cvec(g, map.size());
    const CVec trc = tr * (cf * f), trf = tr * f;
    CHECK((trc.head(nvs) - m.apply(trf.tail(nps))).norm() <= 1e-12 * trc.norm());
    CHECK(trc.tail(nps).norm() == 0.0);

    // the multi-trace version agrees with the embedded free version
    const CMat cm = assemble_C(p, map, m, ext);
    const CVec emb = map.embedding().cast<cplx>() * f;
    CHECK((cm * emb - map.embedding().cast<cplx>() * (cf * f)).norm() <= 1e-12 * emb.norm());
    CHECK((cm * cm).norm() == 0.0);

    const CVec e = ext.apply(CVec::Ones(nvs));
    CHECK(std::abs(e.sum() - double(nvs)) <= 1e-14);
  }
}
