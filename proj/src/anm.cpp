#include "gfanm/anm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

namespace gfanm {

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::optimal:
      return "optimal";
    case SdpStatus::max_iters:
      return "max_iters";
    case SdpStatus::infeasible_like:
      return "infeasible_like";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  if (data.rows() != filter.size() || data.cols() < 1) {
    throw DimensionError("SdpProblem: data must have n = " + std::to_string(filter.size()) +
                         " rows and at least one column");
  }
  if (!data.allFinite()) throw ArgumentError("SdpProblem: data has non-finite entries");
  if (mode == SdpMode::denoise && !(lambda > 0.0)) {
    throw ArgumentError("SdpProblem: λ must be positive in denoise mode");
  }
  if (subspace && subspace->matrix_size() != filter.size()) {
    throw DimensionError("SdpProblem: constraint subspace has the wrong size");
  }
}

CMatrix assemble_block(const CMatrix& z, const CMatrix& s, const CMatrix& sigma) {
  const Index lx = z.rows();
  const Index n = sigma.rows();
  CMatrix block(lx + n, lx + n);
  block.topLeftCorner(lx, lx) = z;
  block.bottomLeftCorner(n, lx) = s;
  block.topRightCorner(lx, n) = s.adjoint();
  block.bottomRightCorner(n, n) = sigma;
  return block;
}

namespace {

constexpr double kTiny = 1e-300;
constexpr int kAdaptInterval = 20;
constexpr double kAdaptRatio = 5.0;
constexpr double kRhoMin = 1e-8;
constexpr double kRhoMax = 1e8;

struct Blocks {
  Index lx;
  Index n;
};

double objective_value(const SdpProblem& p, const CMatrix& z, const CMatrix& s,
                       const CMatrix& sigma) {
  const double traces = z.trace().real() + sigma.trace().real();
  if (p.mode == SdpMode::noiseless) return 0.5 * traces;
  return 0.5 * (p.data - s).squaredNorm() + 0.5 * p.lambda * traces;
}

// Prox of the smooth/affine part at the point m: closed form per block.
CMatrix affine_prox(const SdpProblem& p, const HermitianSubspace& subspace, const CMatrix& m,
                    double rho, Blocks dims) {
  const auto [lx, n] = dims;
  const double weight = p.mode == SdpMode::denoise ? p.lambda : 1.0;
  const double shift = weight / (2.0 * rho);

  CMatrix z = m.topLeftCorner(lx, lx);
  z.diagonal().array() -= shift;

  // The off-diagonal block appears twice in the Frobenius norm of the block.
  const CMatrix m_s = 0.5 * (m.bottomLeftCorner(n, lx) + m.topRightCorner(lx, n).adjoint());
  CMatrix s = p.mode == SdpMode::denoise ? CMatrix((p.data + 2.0 * rho * m_s) / (1.0 + 2.0 * rho))
                                         : p.data;

  CMatrix sigma = m.bottomRightCorner(n, n);
  sigma.diagonal().array() -= shift;
  sigma = subspace.project(sigma);

  return assemble_block(0.5 * (z + z.adjoint()), s, sigma);
}

double default_rho(const SdpProblem& p, Index dim) {
  const double weight = p.mode == SdpMode::denoise ? p.lambda : 1.0;
  const double scale = p.data.norm() / std::sqrt(static_cast<double>(dim));
  if (!(scale > 0.0)) return 1.0;
  return std::clamp(weight / scale, kRhoMin, kRhoMax);
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  problem.validate();
  const Index n = problem.filter.size();
  const Index lx = problem.data.cols();
  const Index dim = n + lx;
  const Blocks dims{lx, n};
  const auto subspace = problem.subspace ? problem.subspace : make_range_subspace(problem.filter);

  CMatrix v = CMatrix::Zero(dim, dim);
  CMatrix u = CMatrix::Zero(dim, dim);
  double rho = options.rho > 0.0 ? options.rho : default_rho(problem, dim);
  if (options.warm_start) {
    const auto& ws = *options.warm_start;
    if (ws.psd.rows() != dim || ws.dual.rows() != dim) {
      throw DimensionError("solve: warm start has the wrong block size");
    }
    v = ws.psd;
    u = ws.dual;
    if (ws.rho > 0.0) rho = ws.rho;
  }

  const double alpha = options.over_relaxation;
  const double abs_tol = options.eps_abs * static_cast<double>(dim);
  SdpSolution out;
  CMatrix w;
  double r_rel = 0.0;
  double s_rel = 0.0;
  int iter = 0;
  for (iter = 1; iter <= options.max_iters; ++iter) {
    w = affine_prox(problem, *subspace, v - u, rho, dims);
    const CMatrix relaxed = alpha * w + (1.0 - alpha) * v;
    const CMatrix v_prev = v;
    v = psd_project(relaxed + u);
    u += relaxed - v;

    const double r = (w - v).norm();
    const double s = rho * (v - v_prev).norm();
    const double primal_scale = std::max(w.norm(), v.norm());
    const double dual_scale = rho * u.norm();
    if (!std::isfinite(r) || !std::isfinite(s)) {
      throw SolverError("solve: non-finite iterate at iteration " + std::to_string(iter) +
                        " (‖W‖ = " + std::to_string(w.norm()) + ", ‖V‖ = " +
                        std::to_string(v.norm()) + ", ‖U‖ = " + std::to_string(u.norm()) +
                        ", ρ = " + std::to_string(rho) + ")");
    }
    r_rel = r / std::max(primal_scale, kTiny);
    s_rel = s / std::max(dual_scale, kTiny);
    if (r <= abs_tol + options.eps_rel * primal_scale && s <= abs_tol + options.eps_rel * dual_scale) {
      out.status = SdpStatus::optimal;
      break;
    }
    if (options.adaptive_rho && iter % kAdaptInterval == 0) {
      if (r_rel > kAdaptRatio * s_rel && rho < kRhoMax) {
        rho *= 2.0;
        u /= 2.0;
      } else if (s_rel > kAdaptRatio * r_rel && rho > kRhoMin) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }
  if (out.status != SdpStatus::optimal) {
    iter = options.max_iters;
    out.status = r_rel > 1e-3 ? SdpStatus::infeasible_like : SdpStatus::max_iters;
  }

  out.z_hat = v.topLeftCorner(lx, lx);
  out.sigma_hat = v.bottomRightCorner(n, n);
  out.s_hat = problem.mode == SdpMode::denoise ? CMatrix(v.bottomLeftCorner(n, lx)) : problem.data;
  out.objective = objective_value(problem, out.z_hat, out.s_hat, out.sigma_hat);
  out.primal_residual = r_rel;
  out.dual_residual = s_rel;
  out.iterations = iter;
  out.final_state = SdpWarmStart{v, u, rho};
  return out;
}

double atomic_norm(const CMatrix& s, const GFilter& f, const SolverOptions& options) {
  if (s.rows() != f.size()) throw DimensionError("atomic_norm: S must have n rows");
  if (s.norm() == 0.0) return 0.0;
  SdpProblem problem{f, s, SdpMode::noiseless, 0.0, nullptr};
  return solve(problem, options).objective;
}

double estimate_noise_variance(const CVector& y) {
  const Index length = y.size();
  if (length < 16) throw ArgumentError("estimate_noise_variance: need at least 16 samples");
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(y.data(), y.data() + length);
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, in);
  std::vector<double> periodogram(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    periodogram[k] = std::norm(spectrum[k]) / static_cast<double>(length);
  }
  std::sort(periodogram.begin(), periodogram.end());
  constexpr double kKeep = 0.75;
  const auto kept = static_cast<std::size_t>(std::floor(kKeep * static_cast<double>(length)));
  double sum = 0.0;
  for (std::size_t k = 0; k < kept; ++k) sum += periodogram[k];
  // Periodogram ordinates of white noise are σ²·Exp(1); the mean of the lowest
  // fraction p of Exp(1) is (1 - (1 - p)(1 - log(1 - p))) / p.
  const double tail = 1.0 - kKeep;
  const double trimmed_mean = (1.0 - tail * (1.0 - std::log(tail))) / kKeep;
  return sum / static_cast<double>(kept) / trimmed_mean;
}

RegParams lambda_heuristic(double sigma_hat, Index n, Index length, Index lx, BetaVariant variant) {
  if (n < 2 || lx < 1 || length < lx) {
    throw ArgumentError("lambda_heuristic: need n >= 2 and L >= L_x >= 1");
  }
  if (sigma_hat < 0.0) throw ArgumentError("lambda_heuristic: σ̂ must be nonnegative");
  const double nd = static_cast<double>(n);
  const double lxd = static_cast<double>(lx);
  const double ld = variant == BetaVariant::as_printed ? static_cast<double>(length) : lxd;
  RegParams out;
  out.sigma_hat = sigma_hat;
  out.alpha = 8.0 * std::numbers::pi * nd * std::log(nd);
  const double log_alx = std::log(out.alpha * lxd);
  out.beta = std::sqrt(lxd + log_alx + std::sqrt(2.0 * ld * log_alx) +
                       std::sqrt(std::numbers::pi * lxd / 2.0) + 1.0);
  out.lambda = sigma_hat * std::sqrt(1.0 + 1.0 / std::log(nd)) * out.beta;
  return out;
}

}  // namespace gfanm
