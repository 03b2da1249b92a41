#include <doctest.h>

#include "gfanm/gfilter.hpp"
#include "unit/support.hpp"

using namespace gfanm;
using namespace testing_support;

TEST_CASE("hermitian_eig on small fixed matrices") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const auto e = hermitian_eig(d);
  CHECK(e.values(0) == doctest::Approx(3.0));
  CHECK(e.values(1) == doctest::Approx(1.0));
  CHECK((e.vectors.cwiseAbs() - CMatrix::Identity(2, 2).cwiseAbs()).norm() < 1e-14);

  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const auto p = hermitian_eig(x);
  CHECK(p.values(0) == doctest::Approx(1.0));
  CHECK(p.values(1) == doctest::Approx(-1.0));
}

TEST_CASE("hermitian_eig recovers a planted spectrum") {
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 20;
    const CMatrix q = random_unitary(n);
    RVector lambda(n);
    for (Index i = 0; i < n; ++i) lambda(i) = uniform(-5.0, 5.0);
    const CMatrix m = q * lambda.cast<std::complex<double>>().asDiagonal() * q.adjoint();
    const auto e = hermitian_eig(m);
    RVector sorted = lambda;
    std::sort(sorted.data(), sorted.data() + n, std::greater<>());
    CHECK((e.values - sorted).cwiseAbs().maxCoeff() < 1e-12);
    for (Index i = 1; i < n; ++i) CHECK(e.values(i) <= e.values(i - 1));
    const CMatrix rebuilt = e.vectors * e.values.cast<std::complex<double>>().asDiagonal() * e.vectors.adjoint();
    CHECK((rebuilt - m).norm() <= 1e-10 * std::max(1.0, m.norm()));
    CHECK((e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).norm() < 1e-10);
  }
}

TEST_CASE("hermitian_eig shifts eigenvalues exactly under M + cI") {
  const CMatrix m = random_hermitian(12);
  const double c = 2.75;
  const auto a = hermitian_eig(m);
  const auto b = hermitian_eig(CMatrix(m + c * CMatrix::Identity(12, 12)));
  CHECK(((b.values.array() - c) - a.values.array()).abs().maxCoeff() < 1e-10);
}

TEST_CASE("hermitian_eig rejects bad input") {
  CHECK_THROWS_AS(hermitian_eig(CMatrix::Zero(2, 3)), DimensionError);
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eig(m), DimensionError);
  // Asymmetry below the tolerance is symmetrized away.
  CMatrix near = random_hermitian(4);
  near(0, 1) += 1e-14;
  CHECK_NOTHROW(hermitian_eig(near));
}

TEST_CASE("solve_discrete_lyapunov closed forms") {
  const CVector b = random_vector(4);
  const CMatrix q = b * b.adjoint();
  CHECK((solve_discrete_lyapunov(CMatrix::Zero(4, 4), q) - q).norm() < 1e-14);

  CMatrix a(1, 1), one(1, 1);
  a(0, 0) = 0.5;
  one(0, 0) = 1.0;
  CHECK(solve_discrete_lyapunov(a, one)(0, 0).real() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("solve_discrete_lyapunov matches the Kronecker solve") {
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 8;
    CMatrix a = random_matrix(n, n);
    a *= uniform(0.3, 0.95) / spectral_radius(a);
    const CMatrix q = random_psd(n, 2);
    const CMatrix e = solve_discrete_lyapunov(a, q);
    const double scale = std::max(1.0, q.norm());
    CHECK((e - a * e * a.adjoint() - q).norm() <= 1e-10 * scale * std::max(1.0, e.norm()));
    CHECK((e - lyapunov_by_kronecker(a, q)).norm() <= 1e-8 * std::max(1.0, e.norm()));
    CHECK((e - e.adjoint()).norm() == 0.0);
    CHECK(hermitian_eig(e).values.minCoeff() > -1e-10 * e.norm());
  }
}

TEST_CASE("solve_discrete_lyapunov on the raw first design pair") {
  const auto [a, b] = build_jordan_filter(g1_poles());
  const CMatrix q = b * b.adjoint();
  const CMatrix e = solve_discrete_lyapunov(a, q);
  CHECK((e - a * e * a.adjoint() - q).norm() < 1e-10 * std::max(1.0, e.norm()));
}

TEST_CASE("solve_discrete_lyapunov rejects unstable A") {
  CMatrix a = CMatrix::Identity(3, 3);
  CHECK_THROWS_AS(solve_discrete_lyapunov(a, CMatrix::Identity(3, 3)), StabilityError);
  a *= 1.5;
  CHECK_THROWS_AS(solve_discrete_lyapunov(a, CMatrix::Identity(3, 3)), StabilityError);
}

TEST_CASE("hermitian_sqrt_psd") {
  CHECK((hermitian_sqrt_psd(CMatrix::Identity(5, 5)) - CMatrix::Identity(5, 5)).norm() < 1e-14);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const CMatrix s = hermitian_sqrt_psd(d);
  CHECK(s(0, 0).real() == doctest::Approx(2.0));
  CHECK(s(1, 1).real() == doctest::Approx(3.0));
  CHECK(std::abs(s(0, 1)) < 1e-14);

  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix e = random_psd(10);
    const CMatrix r = hermitian_sqrt_psd(e);
    CHECK((r * r.adjoint() - e).norm() < 1e-10 * std::max(1.0, e.norm()));
    CHECK((r - r.adjoint()).norm() < 1e-12);
    // sqrt(S²) = S on PSD inputs.
    const CMatrix p = random_psd(10) / 10.0;
    CHECK((hermitian_sqrt_psd(CMatrix(p * p)) - p).norm() < 1e-9);
  }
  // Rank-deficient input: tiny negative rounding is clamped.
  const CMatrix low = random_psd(6, 2);
  CHECK_NOTHROW(hermitian_sqrt_psd(low));

  CMatrix neg = CMatrix::Identity(2, 2);
  neg(1, 1) = -1e-3;
  CHECK_THROWS_AS(hermitian_sqrt_psd(neg), NotPsdError);
}

TEST_CASE("psd_project is the nearest PSD matrix") {
  const CMatrix p = random_psd(6);
  CHECK((psd_project(p) - p).norm() < 1e-12 * p.norm());

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  const CMatrix dp = psd_project(d);
  CHECK(dp(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(dp(1, 1)) < 1e-15);

  const CMatrix m = random_hermitian(8);
  const CMatrix proj = psd_project(m);
  CHECK(hermitian_eig(proj).values.minCoeff() > -1e-12);
  const double dist = (m - proj).norm();
  for (int k = 0; k < 100; ++k) {
    const CMatrix c = random_psd(8, 1 + k % 8) * uniform(0.01, 2.0);
    CHECK(dist <= (m - c).norm() + 1e-12);
  }
  CHECK((psd_project(proj) - proj).norm() < 1e-12 * std::max(1.0, proj.norm()));
  CHECK_THROWS_AS(psd_project(random_matrix(3, 3)), DimensionError);
}

TEST_CASE("lstsq") {
  const CMatrix b = random_matrix(5, 3);
  CHECK((lstsq(CMatrix::Identity(5, 5), b) - b).norm() < 1e-14);

  const CMatrix a = random_matrix(12, 4);
  const CMatrix x0 = random_matrix(4, 2);
  CHECK((lstsq(a, CMatrix(a * x0)) - x0).norm() < 1e-12);

  // Residual placed in null(A*): the solution must ignore it.
  const CMatrix big = random_matrix(40, 5);
  const CVector xt = random_vector(5);
  const CMatrix proj = big * big.completeOrthogonalDecomposition().pseudoInverse();
  const CVector noise = (CMatrix::Identity(40, 40) - proj) * random_vector(40);
  const CVector rhs = big * xt + noise;
  const CMatrix x = lstsq(big, rhs);
  CHECK((x.col(0) - xt).norm() < 1e-8);
  CHECK((big.adjoint() * (rhs - big * x.col(0))).norm() < 1e-10 * rhs.norm());

  // Rank deficient: minimum-norm solution.
  CMatrix def = CMatrix::Zero(3, 2);
  def(0, 0) = def(0, 1) = 1.0;
  CVector rhs2 = CVector::Zero(3);
  rhs2(0) = 2.0;
  const CMatrix xm = lstsq(def, rhs2);
  CHECK(std::abs(xm(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(xm(1, 0) - 1.0) < 1e-12);
  CHECK_THROWS_AS(lstsq(def, CVector::Zero(4)), DimensionError);
}

TEST_CASE("kernels work on long double matrices") {
  using LMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
  LMatrix a = random_matrix(4, 4).cast<std::complex<long double>>();
  a *= 0.5L / static_cast<long double>(spectral_radius(a));
  const LMatrix q = LMatrix::Identity(4, 4);
  const LMatrix e = solve_discrete_lyapunov(a, q);
  CHECK(static_cast<double>((e - a * e * a.adjoint() - q).norm()) < 1e-15);
  const LMatrix r = hermitian_sqrt_psd(e);
  CHECK(static_cast<double>((r * r - e).norm()) < 1e-14);
}
