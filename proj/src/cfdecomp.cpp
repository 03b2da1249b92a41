#include "gfanm/cfdecomp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gfanm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRefineWidth = 1e-10;
constexpr double kPowerFloor = 1e-12;
constexpr double kMaxDictionaryCondition = 1e10;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

template <typename Fn>
double golden_section(Fn&& fn, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = fn(c);
  double fd = fn(d);
  while (hi - lo > kRefineWidth) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = fn(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = fn(d);
    }
  }
  return 0.5 * (lo + hi);
}

struct SigmaNullSpace {
  Index rank;
  CMatrix basis;
};

SigmaNullSpace sigma_null_space(const CMatrix& sigma, const GFilter& f, const RankRule& rule) {
  if (sigma.rows() != f.size() || sigma.cols() != f.size()) {
    throw DimensionError("extract_frequencies: Σ̂ must be n×n");
  }
  auto eig = hermitian_eig(sigma);
  eig.values = eig.values.cwiseMax(0.0);
  const Index rank = numerical_rank(eig.values, rule);
  return {rank, eig.vectors.rightCols(f.size() - rank)};
}

}  // namespace

Index numerical_rank(const RVector& eigenvalues, const RankRule& rule) {
  const Index n = eigenvalues.size();
  if (n < 1) throw ArgumentError("numerical_rank: empty eigenvalue list");
  if (!(rule.abs_threshold > 0.0 && rule.ratio_threshold > 0.0)) {
    throw ArgumentError("numerical_rank: thresholds must be positive");
  }
  for (Index k = 1; k < n; ++k) {
    if (eigenvalues(k) > eigenvalues(k - 1)) {
      throw ArgumentError("numerical_rank: eigenvalues must be sorted descending");
    }
  }
  if (eigenvalues(0) < rule.abs_threshold) return 0;
  for (Index k = 1; k < n; ++k) {
    // k is 1-based here: compare τ_k = eigenvalues(k-1) with τ_{k+1} = eigenvalues(k).
    const double next = eigenvalues(k);
    if (next < rule.abs_threshold) return k;
    if (eigenvalues(k - 1) / next > rule.ratio_threshold) return k;
  }
  return n;
}

NullFunction::NullFunction(const CMatrix& null_basis, const GFilter& f)
    : a_schur_(f.schur_t()), ub_(f.schur_b()) {
  if (null_basis.rows() != f.size()) throw DimensionError("null_function: U must have n rows");
  if (null_basis.cols() == 0) {
    throw ArgumentError("null_function: empty null space (Σ has full rank)");
  }
  projected_u_ = null_basis.adjoint() * f.schur_u();
}

double NullFunction::operator()(double theta) const {
  const std::complex<double> z = std::polar(1.0, theta);
  CMatrix shifted = -a_schur_;
  shifted.diagonal().array() += z;
  const CVector w = shifted.triangularView<Eigen::Upper>().solve(ub_);
  // |z| = 1, so the leading factor z of G drops out of the norm.
  return (projected_u_ * w).squaredNorm();
}

double null_function(const CMatrix& null_basis, const GFilter& f, double theta) {
  return NullFunction(null_basis, f)(theta);
}

std::vector<NullProfilePoint> null_function_profile(const CMatrix& sigma, const GFilter& f,
                                                    Index grid_size, const RankRule& rule) {
  if (grid_size < 2) throw ArgumentError("null_function_profile: grid_size must be >= 2");
  const auto null_space = sigma_null_space(sigma, f, rule);
  const NullFunction d(null_space.basis, f);
  std::vector<NullProfilePoint> out;
  out.reserve(static_cast<std::size_t>(grid_size));
  for (Index k = 0; k < grid_size; ++k) {
    const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(grid_size);
    out.push_back({theta, d(theta)});
  }
  return out;
}

LineSpectrum extract_frequencies(const CMatrix& sigma, const GFilter& f, const RankRule& rule) {
  const auto null_space = sigma_null_space(sigma, f, rule);
  LineSpectrum out;
  out.rank = null_space.rank;
  if (null_space.rank == 0) return out;
  if (null_space.rank == f.size()) {
    throw ArgumentError("extract_frequencies: Σ̂ has full numerical rank; no null function");
  }
  const NullFunction d(null_space.basis, f);

  const Index grid = kScanGridSize;
  const double step = kTwoPi / static_cast<double>(grid);
  std::vector<double> values(static_cast<std::size_t>(grid));
  for (Index k = 0; k < grid; ++k) values[static_cast<std::size_t>(k)] = d(step * static_cast<double>(k));

  struct Candidate {
    double theta;
    double value;
  };
  std::vector<Candidate> minima;
  for (Index k = 0; k < grid; ++k) {
    const double center = values[static_cast<std::size_t>(k)];
    const double left = values[static_cast<std::size_t>((k + grid - 1) % grid)];
    const double right = values[static_cast<std::size_t>((k + 1) % grid)];
    if (center < left && center <= right) {
      const double lo = step * static_cast<double>(k - 1);
      const double hi = step * static_cast<double>(k + 1);
      const double theta = golden_section(d, lo, hi);
      minima.push_back({wrap_angle(theta), d(theta)});
    }
  }
  std::sort(minima.begin(), minima.end(),
            [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  const auto wanted = static_cast<std::size_t>(null_space.rank);
  if (minima.size() < wanted) out.under_resolved = true;
  minima.resize(std::min(minima.size(), wanted));
  for (const auto& c : minima) out.frequencies.push_back(c.theta);
  std::sort(out.frequencies.begin(), out.frequencies.end());
  out.frequencies.erase(std::unique(out.frequencies.begin(), out.frequencies.end()),
                        out.frequencies.end());
  return out;
}

PowerFit recover_powers(const CMatrix& sigma, const GFilter& f, const std::vector<double>& thetas) {
  const Index n = f.size();
  if (sigma.rows() != n || sigma.cols() != n) throw DimensionError("recover_powers: Σ̂ must be n×n");
  if (thetas.empty()) throw ArgumentError("recover_powers: empty frequency list");
  const Index k = static_cast<Index>(thetas.size());
  const Index rows = n * n;
  RMatrix dictionary(2 * rows, k);
  for (Index j = 0; j < k; ++j) {
    const CVector g = f.transfer(thetas[static_cast<std::size_t>(j)]);
    const CMatrix atom = g * g.adjoint();
    const Eigen::Map<const CVector> flat(atom.data(), rows);
    dictionary.col(j).head(rows) = flat.real();
    dictionary.col(j).tail(rows) = flat.imag();
  }
  const CMatrix sym = (sigma + sigma.adjoint()) / 2.0;
  const Eigen::Map<const CVector> target_flat(sym.data(), rows);
  RVector target(2 * rows);
  target.head(rows) = target_flat.real();
  target.tail(rows) = target_flat.imag();

  Eigen::JacobiSVD<RMatrix> svd(dictionary, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  if (!(sv(k - 1) > 0.0) || sv(0) / sv(k - 1) > kMaxDictionaryCondition) {
    throw ConditioningError("recover_powers: rank-one dictionary is nearly collinear");
  }
  const RVector rho = svd.solve(target);
  PowerFit out;
  for (Index j = 0; j < k; ++j) {
    if (rho(j) < kPowerFloor) {
      out.powers.push_back(kPowerFloor);
      out.clamped = true;
    } else {
      out.powers.push_back(rho(j));
    }
  }
  return out;
}

EstimateResult estimate_line_spectrum(const CMatrix& x, const GFilter& f, double lambda,
                                      const RankRule& rule, const SolverOptions& options,
                                      std::shared_ptr<const HermitianSubspace> subspace) {
  EstimateResult out;
  if (x.rows() == f.size() && x.size() > 0 && x.isZero(0.0)) {
    // The SDP optimum is the zero block; nothing to extract.
    out.solution.z_hat = CMatrix::Zero(x.cols(), x.cols());
    out.solution.sigma_hat = CMatrix::Zero(f.size(), f.size());
    out.solution.s_hat = CMatrix::Zero(f.size(), x.cols());
    out.solution.status = SdpStatus::optimal;
    return out;
  }
  try {
    out.solution = solve(SdpProblem{f, x, SdpMode::denoise, lambda, std::move(subspace)}, options);
  } catch (const Error& e) {
    throw StageError("sdp", e.what());
  }
  try {
    out.spectrum = extract_frequencies(out.solution.sigma_hat, f, rule);
  } catch (const Error& e) {
    throw StageError("extract_frequencies", e.what());
  }
  if (out.spectrum.count() == 0) return out;
  try {
    auto fit = recover_powers(out.solution.sigma_hat, f, out.spectrum.frequencies);
    out.spectrum.powers = std::move(fit.powers);
    out.spectrum.powers_clamped = fit.clamped;
  } catch (const Error& e) {
    throw StageError("recover_powers", e.what());
  }
  return out;
}

}  // namespace gfanm
