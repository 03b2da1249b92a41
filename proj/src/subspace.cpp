#include "gfanm/subspace.hpp"

#include <cmath>
#include <numbers>

namespace gfanm {

namespace {

constexpr double kNullTol = 1e-10;

CMatrix constraint_map(const CMatrix& sigma, const CMatrix& a, const CMatrix& complement) {
  return complement * (sigma - a * sigma * a.adjoint()) * complement;
}

CMatrix complement_projector(const CVector& b) {
  const Index n = b.size();
  return CMatrix::Identity(n, n) - b * b.adjoint() / b.squaredNorm();
}

}  // namespace

RVector hermitian_to_coords(const CMatrix& h) {
  const Index n = h.rows();
  RVector v(n * n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) v(k++) = h(i, i).real();
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      v(k++) = std::numbers::sqrt2 * h(i, j).real();
      v(k++) = std::numbers::sqrt2 * h(i, j).imag();
    }
  }
  return v;
}

CMatrix coords_to_hermitian(const RVector& v, Index n) {
  if (v.size() != n * n) throw DimensionError("coords_to_hermitian: expected n² coordinates");
  CMatrix h(n, n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) h(i, i) = v(k++);
  constexpr double inv = 1.0 / std::numbers::sqrt2;
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double re = v(k++) * inv;
      const double im = v(k++) * inv;
      h(i, j) = {re, im};
      h(j, i) = {re, -im};
    }
  }
  return h;
}

RangeGammaSubspace::RangeGammaSubspace(const GFilter& f) : n_(f.size()) {
  const Index dim = n_ * n_;
  const CMatrix complement = complement_projector(f.b());
  RMatrix map(dim, dim);
  RVector unit = RVector::Zero(dim);
  for (Index k = 0; k < dim; ++k) {
    unit(k) = 1.0;
    map.col(k) = hermitian_to_coords(constraint_map(coords_to_hermitian(unit, n_), f.a(), complement));
    unit(k) = 0.0;
  }
  Eigen::BDCSVD<RMatrix> svd(map, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double cutoff = kNullTol * std::max(sv(0), 1e-300);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  basis_ = svd.matrixV().rightCols(dim - rank);
}

CMatrix RangeGammaSubspace::project(const CMatrix& h) const {
  if (h.rows() != n_ || h.cols() != n_) throw DimensionError("RangeGammaSubspace: size mismatch");
  const RVector coords = hermitian_to_coords((h + h.adjoint()) / 2.0);
  return coords_to_hermitian(basis_ * (basis_.transpose() * coords), n_);
}

CMatrix ToeplitzSubspace::project(const CMatrix& h) const {
  if (h.rows() != n_ || h.cols() != n_) throw DimensionError("ToeplitzSubspace: size mismatch");
  CMatrix out(n_, n_);
  out.diagonal().setConstant(h.diagonal().real().mean());
  for (Index k = 1; k < n_; ++k) {
    // Lower diagonal k of (H + H*)/2.
    const std::complex<double> mean =
        (h.diagonal(-k) + h.diagonal(k).conjugate()).mean() / 2.0;
    out.diagonal(-k).setConstant(mean);
    out.diagonal(k).setConstant(std::conj(mean));
  }
  return out;
}

std::shared_ptr<const HermitianSubspace> make_range_subspace(const GFilter& f) {
  if (f.is_delay()) return std::make_shared<ToeplitzSubspace>(f.size());
  return std::make_shared<RangeGammaSubspace>(f);
}

double constraint_residual(const CMatrix& sigma, const GFilter& f) {
  if (sigma.rows() != f.size() || sigma.cols() != f.size()) {
    throw DimensionError("constraint_residual: Σ must be n×n");
  }
  return constraint_map(sigma, f.a(), complement_projector(f.b())).norm();
}

CMatrix project_range_gamma(const CMatrix& sigma, const GFilter& f) {
  return RangeGammaSubspace(f).project(sigma);
}

}  // namespace gfanm
