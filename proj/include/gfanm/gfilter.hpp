#pragma once

#include <utility>
#include <vector>

#include "gfanm/numkernel.hpp"

namespace gfanm {

/// A pole ρe^{iφ} of multiplicity k; contributes a k×k Jordan block.
struct PoleSpec {
  double modulus = 0.0;
  double phase = 0.0;
  int multiplicity = 1;

  std::complex<double> value() const { return std::polar(modulus, phase); }
  friend bool operator==(const PoleSpec&, const PoleSpec&) = default;
};

/// Normalized G-filter x(t) = A x(t-1) + b y(t).
///
/// Construction validates the invariants: spectral radius of A below 1,
/// ‖AA* + bb* - I‖_F <= 1e-10 and a nonsingular reachability Gramian.
/// Instances are immutable; the Schur form of A is cached for fast
/// evaluation of the transfer function.
class GFilter {
 public:
  GFilter(CMatrix a, CVector b, std::vector<PoleSpec> poles = {});

  const CMatrix& a() const noexcept { return a_; }
  const CVector& b() const noexcept { return b_; }
  Index size() const noexcept { return a_.rows(); }
  const std::vector<PoleSpec>& poles() const noexcept { return poles_; }

  /// True for the shift-register pair (ones on the superdiagonal, b = e_n).
  bool is_delay() const noexcept { return is_delay_; }

  /// G(e^{iθ}) = e^{iθ}(e^{iθ}I - A)^{-1} b.
  CVector transfer(double theta) const;

  /// ‖AA* + bb* - I‖_F.
  double normalization_residual() const;

  /// Complex Schur form A = U T U*, with U* b.
  const CMatrix& schur_u() const noexcept { return schur_u_; }
  const CMatrix& schur_t() const noexcept { return schur_t_; }
  const CVector& schur_b() const noexcept { return ub_; }

 private:
  CMatrix a_;
  CVector b_;
  std::vector<PoleSpec> poles_;
  bool is_delay_ = false;
  // A = U T U*, T upper triangular; ub_ = U* b.
  CMatrix schur_u_;
  CMatrix schur_t_;
  CVector ub_;
};

/// Output states collected after dropping the transient.
struct OutputMatrix {
  CMatrix x;             // n × L_x, columns in time order
  Index discarded = 0;   // L_s
};

/// Block-diagonal Jordan realization of the given poles (unnormalized).
std::pair<CMatrix, CVector> build_jordan_filter(const std::vector<PoleSpec>& poles);

/// Brings (Ã, b̃) to AA* + bb* = I through E^{-1/2}(Ã, b̃)E^{1/2} with E the
/// reachability Gramian. Runs in quad precision.
GFilter normalize_filter(const CMatrix& a_raw, const CVector& b_raw,
                         std::vector<PoleSpec> poles = {});

/// Builds and normalizes the Jordan realization of `poles`.
GFilter design_filter(const std::vector<PoleSpec>& poles);

/// Shift-register (delay) filter bank of size n; already normalized.
GFilter delay_filter(Index n);

/// Single repeated pole 0.58e^{2i}, n = 20: passband [1.75, 2.25].
GFilter g1_filter();
/// Poles 0.58e^{1.7i} and 0.58e^{3.3i}, multiplicity 10 each.
GFilter g2_filter();
std::vector<PoleSpec> g1_poles();
std::vector<PoleSpec> g2_poles();

CVector transfer_vector(const GFilter& f, double theta);

struct GainPoint {
  double theta;
  double gain;  // ‖G(e^{iθ})‖²
};
std::vector<GainPoint> squared_gain_profile(const GFilter& f, Index grid_size);

/// Smallest L_s >= 1 with ‖A^{L_s}‖_2 < ε.
Index transient_length(const GFilter& f, double epsilon);

/// Runs the recursion from x(-1) = 0 and keeps states x(L_s), ..., x(L-1).
OutputMatrix apply_filter(const GFilter& f, const CVector& y, double epsilon);
/// Same with an explicit number of discarded states.
OutputMatrix apply_filter_skip(const GFilter& f, const CVector& y, Index discard);

/// Numerical rank of the reachability Gramian of (A, b) at 1e-8 relative.
Index reachability_rank(const CMatrix& a, const CVector& b);

}  // namespace gfanm
