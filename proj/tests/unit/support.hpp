#pragma once

// Test-side generators and reference computations. Nothing here calls into
// the routine it is used to check.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gfanm/numkernel.hpp"

namespace testing_support {

using gfanm::CMatrix;
using gfanm::CVector;
using gfanm::Index;
using gfanm::RVector;

inline std::mt19937_64& rng() {
  static thread_local std::mt19937_64 engine(20240611);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline std::complex<double> cgauss() {
  std::normal_distribution<double> g;
  return {g(rng()), g(rng())};
}

inline CMatrix random_matrix(Index r, Index c) {
  CMatrix m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = cgauss();
  return m;
}

inline CVector random_vector(Index n) { return random_matrix(n, 1).col(0); }

inline CMatrix random_hermitian(Index n) {
  const CMatrix m = random_matrix(n, n);
  return (m + m.adjoint()) / 2.0;
}

inline CMatrix random_psd(Index n, Index rank = -1) {
  const CMatrix r = random_matrix(n, rank < 0 ? n : rank);
  return r * r.adjoint();
}

// Q factor of a Gaussian matrix with the phases of R's diagonal removed.
inline CMatrix random_unitary(Index n) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(n, n));
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
  return q;
}

inline CMatrix random_toeplitz_hermitian(Index n) {
  std::vector<std::complex<double>> c(static_cast<std::size_t>(n));
  c[0] = cgauss().real();
  for (Index k = 1; k < n; ++k) c[static_cast<std::size_t>(k)] = cgauss();
  CMatrix t(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      t(i, j) = i >= j ? c[static_cast<std::size_t>(i - j)] : std::conj(c[static_cast<std::size_t>(j - i)]);
  return t;
}

// E - A E A* = Q through the Kronecker form (I - conj(A) ⊗ A) vec(E) = vec(Q).
inline CMatrix lyapunov_by_kronecker(const CMatrix& a, const CMatrix& q) {
  const Index n = a.rows();
  CMatrix k = CMatrix::Identity(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) k.block(j * n, i * n, n, n) -= std::conj(a(j, i)) * a;
  const CVector vq = Eigen::Map<const CVector>(q.data(), n * n);
  const CVector ve = k.partialPivLu().solve(vq);
  return Eigen::Map<const CMatrix>(ve.data(), n, n);
}

// Each diagonal replaced by its mean.
inline CMatrix toeplitz_average(const CMatrix& h) {
  const Index n = h.rows();
  CMatrix out(n, n);
  for (Index d = -(n - 1); d <= n - 1; ++d) {
    std::complex<double> sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
      const Index j = i - d;
      if (j >= 0 && j < n) {
        sum += h(i, j);
        ++count;
      }
    }
    for (Index i = 0; i < n; ++i) {
      const Index j = i - d;
      if (j >= 0 && j < n) out(i, j) = sum / static_cast<double>(count);
    }
  }
  return out;
}

// G(z) = z (zI - A)^{-1} b by LU, without any cached factorization.
inline CVector transfer_by_lu(const CMatrix& a, const CVector& b, double theta) {
  const std::complex<double> z = std::polar(1.0, theta);
  const CMatrix m = z * CMatrix::Identity(a.rows(), a.cols()) - a;
  return z * m.partialPivLu().solve(b);
}

inline double rel(double got, double want) { return std::abs(got - want) / std::max(1e-300, std::abs(want)); }

}  // namespace testing_support
