#pragma once

// Quad-precision scalar types for the numkernel templates. Used where double
// precision cannot resolve the problem, e.g. reachability Gramians of Jordan
// realizations whose condition number is close to 1e17.

#include <complex>

#include <boost/multiprecision/complex128.hpp>
#include <boost/multiprecision/float128.hpp>
#include <Eigen/Core>
#include <boost/multiprecision/eigen.hpp>

// Eigen 3.4's generic hypot path asks NumTraits for infinity()/quiet_NaN(),
// which the Boost 1.74 Eigen bindings do not provide for float128.
namespace Eigen::internal {
template <>
inline boost::multiprecision::float128 positive_real_hypot<boost::multiprecision::float128>(
    const boost::multiprecision::float128& x, const boost::multiprecision::float128& y) {
  using boost::multiprecision::float128;
  const float128 p = x > y ? x : y;
  if (p == 0) return float128(0);
  const float128 q = (x > y ? y : x) / p;
  return p * sqrt(1 + q * q);
}
}  // namespace Eigen::internal

#include "gfanm/numkernel.hpp"

namespace gfanm::quad {

using Real = boost::multiprecision::float128;
using Complex = boost::multiprecision::complex128;
using Matrix = MatrixX<Complex>;

inline Matrix from_double(const CMatrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = Complex(m(i, j).real(), m(i, j).imag());
  return out;
}

template <typename Derived>
CMatrix to_double(const Eigen::MatrixBase<Derived>& m) {
  return detail::to_complex_double(m);
}

}  // namespace gfanm::quad
