#pragma once

// Dense complex linear-algebra kernels. Everything here is templated on the
// Eigen expression type so the same code runs in double and in quad precision
// (see gfanm/quad.hpp).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "gfanm/errors.hpp"

namespace gfanm {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
template <typename Scalar>
struct HermEig {
  VectorX<RealOf<Scalar>> values;
  MatrixX<Scalar> vectors;
};

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(who) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

template <typename Derived>
RealOf<typename Derived::Scalar> hermitian_defect(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).norm();
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& m, const char* who) {
  using Real = RealOf<typename Derived::Scalar>;
  require_square(m, who);
  const Real scale = std::max(Real(1), Real(m.norm()));
  if (hermitian_defect(m) > Real(1e-12) * scale) {
    throw DimensionError(std::string(who) + ": matrix is not Hermitian");
  }
}

template <typename Derived>
CMatrix to_complex_double(const Eigen::MatrixBase<Derived>& m) {
  using Eigen::numext::imag;
  using Eigen::numext::real;
  CMatrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      out(i, j) = {static_cast<double>(real(m(i, j))), static_cast<double>(imag(m(i, j)))};
    }
  }
  return out;
}

}  // namespace detail

/// Hermitian eigendecomposition with descending eigenvalues. The input is
/// symmetrized as (M + M*)/2 after the Hermiticity check.
template <typename Derived>
HermEig<typename Derived::Scalar> hermitian_eig(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_hermitian(m, "hermitian_eig");
  const MatrixX<Scalar> sym = (m + m.adjoint()) / RealOf<Scalar>(2);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(sym);
  if (es.info() != Eigen::Success) {
    throw ConditioningError("hermitian_eig: eigensolver did not converge");
  }
  HermEig<Scalar> out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

/// Largest eigenvalue modulus, evaluated in double precision.
template <typename Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& a) {
  detail::require_square(a, "spectral_radius");
  Eigen::ComplexEigenSolver<CMatrix> es(detail::to_complex_double(a), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Largest singular value.
template <typename Derived>
RealOf<typename Derived::Scalar> spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.size() == 0) return RealOf<Scalar>(0);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(a);
  return svd.singularValues()(0);
}

/// Solves E - A E A* = Q for Schur-stable A.
///
/// Uses the squared Smith (doubling) recursion E <- E + A_k E A_k*,
/// A_k <- A_k^2, which only needs matrix products: this keeps the solve cheap
/// in emulated quad precision and every iterate Hermitian PSD when Q is.
template <typename DerivedA, typename DerivedQ>
MatrixX<typename DerivedA::Scalar> solve_discrete_lyapunov(const Eigen::MatrixBase<DerivedA>& a,
                                                           const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedA::Scalar;
  using Real = RealOf<Scalar>;
  detail::require_square(a, "solve_discrete_lyapunov");
  detail::require_hermitian(q, "solve_discrete_lyapunov");
  if (q.rows() != a.rows()) {
    throw DimensionError("solve_discrete_lyapunov: A and Q must have the same size");
  }
  const double radius = spectral_radius(a);
  if (!(radius < 1.0)) {
    throw StabilityError("solve_discrete_lyapunov: spectral radius " + std::to_string(radius) +
                         " is not below 1");
  }

  const Real eps = std::numeric_limits<Real>::epsilon();
  MatrixX<Scalar> e = (q + q.adjoint()) / Real(2);
  MatrixX<Scalar> ak = a;
  constexpr int kMaxDoublings = 64;
  for (int k = 0; k < kMaxDoublings; ++k) {
    const Real ak_norm = ak.norm();
    if (!(ak_norm < Real(1e150))) break;
    e = (e + ak * e * ak.adjoint()).eval();
    e = ((e + e.adjoint()) / Real(2)).eval();
    if (ak_norm * ak_norm < eps) {
      return e;
    }
    ak = (ak * ak).eval();
  }
  throw StabilityError("solve_discrete_lyapunov: doubling iteration did not converge");
}

/// Rebuilds V f(Λ) V*.
template <typename Scalar, typename Fn>
MatrixX<Scalar> apply_spectral(const HermEig<Scalar>& eig, Fn&& fn) {
  VectorX<RealOf<Scalar>> mapped = eig.values;
  for (Index i = 0; i < mapped.size(); ++i) mapped(i) = fn(mapped(i));
  MatrixX<Scalar> out = eig.vectors * mapped.template cast<Scalar>().asDiagonal() *
                        eig.vectors.adjoint();
  return (out + out.adjoint()) / RealOf<Scalar>(2);
}

namespace detail {

template <typename Scalar>
void require_psd_spectrum(const HermEig<Scalar>& eig, const char* who) {
  using Real = RealOf<Scalar>;
  const Real scale = std::max(Real(1), Real(eig.values.cwiseAbs().maxCoeff()));
  if (eig.values(eig.values.size() - 1) < Real(-1e-8) * scale) {
    throw NotPsdError(std::string(who) + ": matrix has a negative eigenvalue");
  }
}

}  // namespace detail

/// Hermitian PSD principal square root S (S = S*, S S* = E).
/// Eigenvalues down to -1e-8 (relative) are clamped to zero.
template <typename Derived>
MatrixX<typename Derived::Scalar> hermitian_sqrt_psd(const Eigen::MatrixBase<Derived>& e) {
  using Scalar = typename Derived::Scalar;
  using Real = RealOf<Scalar>;
  const auto eig = hermitian_eig(e);
  detail::require_psd_spectrum(eig, "hermitian_sqrt_psd");
  return apply_spectral(eig, [](const Real& v) {
    using std::sqrt;
    return v > Real(0) ? Real(sqrt(v)) : Real(0);
  });
}

/// Pair (E^{1/2}, E^{-1/2}) for Hermitian positive definite E.
/// Throws ConditioningError when λ_min/λ_max falls below `min_ratio`.
template <typename Derived>
std::pair<MatrixX<typename Derived::Scalar>, MatrixX<typename Derived::Scalar>> hermitian_sqrt_pair(
    const Eigen::MatrixBase<Derived>& e, RealOf<typename Derived::Scalar> min_ratio) {
  using Scalar = typename Derived::Scalar;
  using Real = RealOf<Scalar>;
  const auto eig = hermitian_eig(e);
  const Real top = eig.values(0);
  const Real bottom = eig.values(eig.values.size() - 1);
  if (!(top > Real(0)) || !(bottom > min_ratio * top)) {
    throw ConditioningError("hermitian_sqrt_pair: matrix is numerically singular");
  }
  using std::sqrt;
  return {apply_spectral(eig, [](const Real& v) { return Real(sqrt(v)); }),
          apply_spectral(eig, [](const Real& v) { return Real(Real(1) / sqrt(v)); })};
}

/// Frobenius-nearest PSD matrix: negative eigenvalues are zeroed.
template <typename Derived>
MatrixX<typename Derived::Scalar> psd_project(const Eigen::MatrixBase<Derived>& m) {
  using Real = RealOf<typename Derived::Scalar>;
  const auto eig = hermitian_eig(m);
  return apply_spectral(eig, [](const Real& v) { return v > Real(0) ? v : Real(0); });
}

/// Minimum-norm least-squares solution of A X = B.
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> lstsq(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() != b.rows()) {
    throw DimensionError("lstsq: A and B must have the same number of rows");
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixX<Scalar>> cod(a);
  return cod.solve(b);
}

}  // namespace gfanm
