#pragma once

#include <memory>

#include "gfanm/gfilter.hpp"

namespace gfanm {

/// Isometric real coordinates of an n×n Hermitian matrix (n² reals):
/// diagonal entries, then √2·Re and √2·Im of the strict upper triangle.
RVector hermitian_to_coords(const CMatrix& h);
CMatrix coords_to_hermitian(const RVector& v, Index n);

/// Orthogonal projector onto a real-linear subspace of Hermitian matrices.
class HermitianSubspace {
 public:
  virtual ~HermitianSubspace() = default;
  virtual CMatrix project(const CMatrix& h) const = 0;
  virtual Index matrix_size() const = 0;
  /// Real dimension of the subspace.
  virtual Index dimension() const = 0;
};

/// The output-covariance subspace of a G-filter,
/// {Σ : (I - Π_b)(Σ - AΣA*)(I - Π_b) = 0}, held as a cached orthonormal
/// basis of the null space of that linear map.
class RangeGammaSubspace final : public HermitianSubspace {
 public:
  explicit RangeGammaSubspace(const GFilter& f);
  CMatrix project(const CMatrix& h) const override;
  Index matrix_size() const override { return n_; }
  Index dimension() const override { return basis_.cols(); }
  const RMatrix& basis() const noexcept { return basis_; }

 private:
  Index n_;
  RMatrix basis_;  // n² × d, orthonormal columns
};

/// Hermitian Toeplitz matrices; projection averages each diagonal.
class ToeplitzSubspace final : public HermitianSubspace {
 public:
  explicit ToeplitzSubspace(Index n) : n_(n) {}
  CMatrix project(const CMatrix& h) const override;
  Index matrix_size() const override { return n_; }
  Index dimension() const override { return 2 * n_ - 1; }

 private:
  Index n_;
};

/// Toeplitz closed form for the delay filter, cached null-space basis otherwise.
std::shared_ptr<const HermitianSubspace> make_range_subspace(const GFilter& f);

/// ‖(I - Π_b)(Σ - AΣA*)(I - Π_b)‖_F.
double constraint_residual(const CMatrix& sigma, const GFilter& f);

/// Frobenius-nearest Hermitian matrix satisfying the range constraint.
CMatrix project_range_gamma(const CMatrix& sigma, const GFilter& f);

}  // namespace gfanm
