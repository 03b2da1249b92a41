#pragma once

#include <vector>

#include "gfanm/anm.hpp"
#include "gfanm/gfilter.hpp"

namespace gfanm {

struct RankRule {
  double abs_threshold = 1e-3;
  double ratio_threshold = 1e3;
};

struct LineSpectrum {
  std::vector<double> frequencies;  // ascending, in [0, 2π)
  std::vector<double> powers;       // aligned with frequencies
  Index rank = 0;                   // numerical rank r̂ of Σ̂
  bool under_resolved = false;      // fewer null-function minima than r̂
  bool powers_clamped = false;      // a least-squares power hit the floor

  std::size_t count() const noexcept { return frequencies.size(); }
};

/// Smallest k in 1..n-1 with τ_{k+1} < abs or τ_k/τ_{k+1} > ratio; n if none,
/// 0 if τ_1 < abs. Eigenvalues must be sorted descending.
Index numerical_rank(const RVector& eigenvalues, const RankRule& rule = {});

/// d(θ) = ‖U* G(e^{iθ})‖² for a null-space basis U (n × (n - r)).
double null_function(const CMatrix& null_basis, const GFilter& f, double theta);

/// Evaluates the null function on many points, reusing the Schur form of A.
class NullFunction {
 public:
  NullFunction(const CMatrix& null_basis, const GFilter& f);
  double operator()(double theta) const;

 private:
  CMatrix a_schur_;  // upper triangular T
  CMatrix projected_u_;  // U* (Schur basis)
  CVector ub_;
};

struct NullProfilePoint {
  double theta;
  double value;
};
std::vector<NullProfilePoint> null_function_profile(const CMatrix& sigma, const GFilter& f,
                                                    Index grid_size, const RankRule& rule = {});

inline constexpr Index kScanGridSize = 8192;

/// Numerical rank plus frequency localization by grid scan and golden-section
/// refinement of the null function. Powers are left empty.
LineSpectrum extract_frequencies(const CMatrix& sigma, const GFilter& f, const RankRule& rule = {});

/// Least-squares fit of vec(Σ̂) against vec(G_k G_k*).
struct PowerFit {
  std::vector<double> powers;
  bool clamped = false;
};
PowerFit recover_powers(const CMatrix& sigma, const GFilter& f, const std::vector<double>& thetas);

struct EstimateResult {
  LineSpectrum spectrum;
  SdpSolution solution;
};

/// Denoising SDP followed by frequency extraction and power recovery.
EstimateResult estimate_line_spectrum(const CMatrix& x, const GFilter& f, double lambda,
                                      const RankRule& rule = {},
                                      const SolverOptions& options = {},
                                      std::shared_ptr<const HermitianSubspace> subspace = nullptr);

}  // namespace gfanm
