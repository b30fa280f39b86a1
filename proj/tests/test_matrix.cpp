#include <cmath>

#include "doctest.h"
#include "lrkf/errors.hpp"
#include "lrkf/matrix.hpp"
#include "test_util.hpp"

using namespace lrkf;
using lrkf::testing::diag_mat;
using lrkf::testing::random_hermitian;
using lrkf::testing::random_pd;

TEST_CASE("hermitian_eig on identity and diagonal input") {
  const auto eye = hermitian_eig(CMat::Identity(3, 3));
  CHECK((eye.values - RVec::Ones(3)).norm() < 1e-14);
  CHECK((eye.vectors * eye.values.asDiagonal() * eye.vectors.adjoint() - CMat::Identity(3, 3))
            .norm() < 1e-12);

  const auto d = hermitian_eig(diag_mat({2.0, -1.0}));
  CHECK(d.values(0) == doctest::Approx(-1.0));
  CHECK(d.values(1) == doctest::Approx(2.0));
  // Permuted identity columns with the positive-real phase convention.
  CHECK(std::abs(d.vectors(1, 0) - cdouble(1.0)) < 1e-14);
  CHECK(std::abs(d.vectors(0, 1) - cdouble(1.0)) < 1e-14);
}

TEST_CASE("hermitian_eig reconstructs random Hermitian matrices up to size 16") {
  Rng rng(11);
  for (int n : {1, 2, 4, 7, 16}) {
    for (int rep = 0; rep < 20; ++rep) {
      const CMat h = random_hermitian(rng, n);
      const auto e = hermitian_eig(h);
      const CMat back = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
      CHECK((back - h).norm() <= 1e-9 * h.norm());
      CHECK((e.vectors.adjoint() * e.vectors - CMat::Identity(n, n)).norm() < 1e-10);
      for (int k = 1; k < n; ++k) CHECK(e.values(k) >= e.values(k - 1));
    }
  }
}

TEST_CASE("hermitian_eig phase convention") {
  Rng rng(12);
  const CMat h = random_hermitian(rng, 5);
  const auto e = hermitian_eig(h);
  for (int k = 0; k < 5; ++k) {
    Eigen::Index arg = 0;
    e.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    CHECK(std::abs(e.vectors(arg, k).imag()) < 1e-14);
    CHECK(e.vectors(arg, k).real() > 0.0);
  }
  // Same input, same output.
  const auto again = hermitian_eig(h);
  CHECK(again.vectors == e.vectors);
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  CMat a(2, 2);
  a << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(hermitian_eig(a), ContractViolation);
}

TEST_CASE("psd_sqrt and psd_inv_sqrt") {
  const CMat s = psd_sqrt(diag_mat({4.0, 9.0}));
  CHECK((s - diag_mat({2.0, 3.0})).norm() < 1e-12);
  CHECK((psd_sqrt(CMat::Identity(3, 3)) - CMat::Identity(3, 3)).norm() < 1e-12);
  CHECK((psd_inv_sqrt(diag_mat({4.0, 9.0})) - diag_mat({0.5, 1.0 / 3.0})).norm() < 1e-12);

  Rng rng(13);
  for (int rep = 0; rep < 1000; ++rep) {
    const CMat a = rng.complex_normal_matrix(4, 4);
    const CMat h = hermitianize(a.adjoint() * a);
    const CMat r = psd_sqrt(h);
    CHECK(is_hermitian(r));
    CHECK((r * r - h).norm() <= 1e-9 * (1.0 + h.norm()));
  }

  const CMat pd = random_pd(rng, 4);
  const CMat ir = psd_inv_sqrt(pd);
  CHECK((ir * ir * pd - CMat::Identity(4, 4)).norm() < 1e-9);
}

TEST_CASE("psd_sqrt clamps round-off but rejects indefinite input") {
  CHECK_NOTHROW(psd_sqrt(diag_mat({1.0, -1e-10})));
  CHECK_THROWS_AS(psd_sqrt(diag_mat({1.0, -0.1})), ContractViolation);
}

TEST_CASE("psd_inv_sqrt names the offending eigenvalue") {
  try {
    psd_inv_sqrt(diag_mat({1.0, 0.0}));
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.eigenvalue() == doctest::Approx(0.0));
  }
}

TEST_CASE("hpd_inverse") {
  Rng rng(14);
  const CMat h = random_pd(rng, 5);
  CHECK((hpd_inverse(h) * h - CMat::Identity(5, 5)).norm() < 1e-10);
  CHECK(is_hermitian(hpd_inverse(h)));
}

TEST_CASE("vec uses column-major stacking") {
  CMat c(2, 2);
  c << 1.0, 3.0, 2.0, 4.0;
  const CVec v = vec(c);
  REQUIRE(v.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(v(k) == cdouble(k + 1.0));

  Rng rng(15);
  const CMat r = rng.complex_normal_matrix(4, 3);
  CHECK(unvec(vec(r), 4, 3) == r);  // bit-exact
  CHECK(vec(r).squaredNorm() == doctest::Approx(frobenius_norm_sq(r)).epsilon(1e-14));
  CHECK_THROWS_AS(unvec(vec(r), 5, 3), ContractViolation);
}

TEST_CASE("complex_to_real_embed") {
  RMat real(2, 2);
  real << 1.0, 2.0, 2.0, 3.0;
  const RMat e = complex_to_real_embed(real.cast<cdouble>());
  CHECK(e.topLeftCorner(2, 2) == real);
  CHECK(e.bottomRightCorner(2, 2) == real);
  CHECK(e.topRightCorner(2, 2).norm() == 0.0);
  CHECK(e.bottomLeftCorner(2, 2).norm() == 0.0);

  CMat h(2, 2);
  h << 0.0, cdouble(0, 1), cdouble(0, -1), 0.0;
  const Eigen::SelfAdjointEigenSolver<RMat> es(complex_to_real_embed(h));
  const RVec ev = es.eigenvalues();
  CHECK(ev(0) == doctest::Approx(-1.0));
  CHECK(ev(1) == doctest::Approx(-1.0));
  CHECK(ev(2) == doctest::Approx(1.0));
  CHECK(ev(3) == doctest::Approx(1.0));

  Rng rng(16);
  for (int rep = 0; rep < 200; ++rep) {
    const CMat r = random_hermitian(rng, 4);
    const RMat emb = complex_to_real_embed(r);
    CHECK(emb.trace() == doctest::Approx(2.0 * r.trace().real()));
    CHECK((real_to_complex(emb) - r).norm() < 1e-14);
    // PSD status agrees both ways.
    const double lc = min_eigenvalue(r);
    const double lr = Eigen::SelfAdjointEigenSolver<RMat>(emb).eigenvalues()(0);
    CHECK(std::abs(lc - lr) < 1e-10);
  }
}

TEST_CASE("real_to_complex averages blocks of a non-embedded symmetric matrix") {
  RMat s = RMat::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = 3.0;
  const CMat h = real_to_complex(s);
  CHECK(h(0, 0) == cdouble(2.0));
}

TEST_CASE("frobenius_norm_sq") {
  CHECK(frobenius_norm_sq(CMat::Identity(4, 4)) == 4.0);
  CHECK(frobenius_norm_sq(CMat::Zero(3, 2)) == 0.0);
  Rng rng(17);
  const CMat c = rng.complex_normal_matrix(3, 5);
  CHECK(frobenius_norm_sq(c) == doctest::Approx((c.adjoint() * c).trace().real()));
}

TEST_CASE("is_hermitian tolerance scales with the norm") {
  CMat h = CMat::Identity(2, 2) * 1e6;
  h(0, 1) = 1e-5;
  CHECK(is_hermitian(h));
  h(0, 1) = 1.0;
  CHECK_FALSE(is_hermitian(h));
}
