#pragma once

#include <memory>
#include <optional>
#include <string>

#include "gfanm/gfilter.hpp"
#include "gfanm/subspace.hpp"

namespace gfanm {

enum class SdpMode {
  noiseless,  // minimize ½(tr Z + tr Σ) with S fixed to the data
  denoise,    // minimize ½‖X - S‖² + (λ/2)(tr Z + tr Σ)
};

enum class SdpStatus { optimal, max_iters, infeasible_like };

std::string to_string(SdpStatus status);

struct SdpProblem {
  GFilter filter;
  CMatrix data;  // n × L_x
  SdpMode mode = SdpMode::denoise;
  double lambda = 0.0;
  /// Range constraint on Σ; built from `filter` when empty.
  std::shared_ptr<const HermitianSubspace> subspace;

  void validate() const;
};

/// ADMM iterate [[Z, S*], [S, Σ]] split as (primal copy, PSD copy, scaled dual).
struct SdpWarmStart {
  CMatrix psd;
  CMatrix dual;
  double rho = 0.0;
};

struct SolverOptions {
  double eps_rel = 1e-6;
  double eps_abs = 1e-9;
  int max_iters = 50'000;
  double rho = 0.0;  // initial penalty; 0 selects a data-scaled default
  double over_relaxation = 1.6;
  bool adaptive_rho = true;
  std::optional<SdpWarmStart> warm_start;
};

struct SdpSolution {
  CMatrix z_hat;      // L_x × L_x
  CMatrix sigma_hat;  // n × n
  CMatrix s_hat;      // n × L_x
  double objective = 0.0;
  double primal_residual = 0.0;  // relative
  double dual_residual = 0.0;    // relative
  int iterations = 0;
  SdpStatus status = SdpStatus::max_iters;
  SdpWarmStart final_state;
};

/// Operator-splitting solver for the atomic-norm SDPs: alternates between the
/// affine/quadratic part (closed-form prox with the range-Γ projection) and
/// the PSD cone of the (L_x + n) block, with residual-balanced penalty.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

/// p = optimal value of the noiseless SDP.
double atomic_norm(const CMatrix& s, const GFilter& f, const SolverOptions& options = {});

/// Block matrix [[Z, S*], [S, Σ]].
CMatrix assemble_block(const CMatrix& z, const CMatrix& s, const CMatrix& sigma);

/// Mean of the lowest 75% of periodogram ordinates |DFT(y)|²/L, rescaled by
/// the trimmed mean of a unit exponential so that pure white noise gives an
/// unbiased estimate of σ².
double estimate_noise_variance(const CVector& y);

struct RegParams {
  double lambda = 0.0;
  double sigma_hat = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
};

enum class BetaVariant {
  as_printed,  // √(2L log(αL_x)) with the full signal length L
  lx_only,     // same term with L_x in place of L
};

/// λ = σ̂ (1 + 1/log n)^{1/2} β with
/// β = (L_x + log(αL_x) + √(2L log(αL_x)) + √(πL_x/2) + 1)^{1/2}, α = 8πn log n.
RegParams lambda_heuristic(double sigma_hat, Index n, Index length, Index lx,
                           BetaVariant variant = BetaVariant::as_printed);

}  // namespace gfanm
