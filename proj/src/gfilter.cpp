#include "gfanm/gfilter.hpp"

#include <numbers>

#include "gfanm/quad.hpp"

namespace gfanm {

namespace {

constexpr double kNormalizationTol = 1e-10;
constexpr double kReachabilityTol = 1e-8;
// Smallest admissible λ_min/λ_max of the Gramian, in quad precision. Beyond
// this the similarity transform loses more than ~1e-12 when rounded to double.
constexpr double kGramianMinRatio = 1e-20;
constexpr Index kMaxTransientIterations = 1'000'000;

bool is_shift_register(const CMatrix& a, const CVector& b) {
  const Index n = a.rows();
  CMatrix shift = CMatrix::Zero(n, n);
  shift.diagonal(1).setOnes();
  CVector en = CVector::Zero(n);
  en(n - 1) = 1.0;
  return a == shift && b == en;
}

}  // namespace

GFilter::GFilter(CMatrix a, CVector b, std::vector<PoleSpec> poles)
    : a_(std::move(a)), b_(std::move(b)), poles_(std::move(poles)) {
  if (a_.rows() != a_.cols() || a_.rows() == 0 || b_.size() != a_.rows()) {
    throw DimensionError("GFilter: A must be n×n and b of length n");
  }
  if (!a_.allFinite() || !b_.allFinite()) {
    throw ArgumentError("GFilter: non-finite entries");
  }
  if (!(spectral_radius(a_) < 1.0)) {
    throw StabilityError("GFilter: A is not Schur stable");
  }
  const double residual = normalization_residual();
  if (!(residual <= kNormalizationTol)) {
    throw ArgumentError("GFilter: pair is not normalized (‖AA* + bb* - I‖_F = " +
                        std::to_string(residual) + "); use normalize_filter");
  }
  if (reachability_rank(a_, b_) != size()) {
    throw ConditioningError("GFilter: pair (A, b) is not reachable");
  }
  is_delay_ = is_shift_register(a_, b_);

  Eigen::ComplexSchur<CMatrix> schur(a_);
  schur_u_ = schur.matrixU();
  schur_t_ = schur.matrixT();
  ub_ = schur_u_.adjoint() * b_;
}

CVector GFilter::transfer(double theta) const {
  const std::complex<double> z = std::polar(1.0, theta);
  CMatrix shifted = -schur_t_;
  shifted.diagonal().array() += z;
  CVector w = shifted.triangularView<Eigen::Upper>().solve(ub_);
  return z * (schur_u_ * w);
}

double GFilter::normalization_residual() const {
  const Index n = size();
  return (a_ * a_.adjoint() + b_ * b_.adjoint() - CMatrix::Identity(n, n)).norm();
}

std::pair<CMatrix, CVector> build_jordan_filter(const std::vector<PoleSpec>& poles) {
  if (poles.empty()) throw ArgumentError("build_jordan_filter: empty pole list");
  Index n = 0;
  for (const auto& p : poles) {
    if (p.multiplicity < 1) throw ArgumentError("build_jordan_filter: multiplicity must be >= 1");
    if (!(p.modulus >= 0.0 && p.modulus < 1.0)) {
      throw StabilityError("build_jordan_filter: pole modulus must lie in [0, 1)");
    }
    n += p.multiplicity;
  }
  CMatrix a = CMatrix::Zero(n, n);
  CVector b = CVector::Zero(n);
  Index offset = 0;
  for (const auto& p : poles) {
    const Index k = p.multiplicity;
    // An exactly zero modulus gives the exact shift register.
    const std::complex<double> value = p.modulus == 0.0 ? 0.0 : p.value();
    a.block(offset, offset, k, k).diagonal().setConstant(value);
    a.block(offset, offset, k, k).diagonal(1).setOnes();
    b(offset + k - 1) = 1.0;
    offset += k;
  }
  return {a, b};
}

GFilter normalize_filter(const CMatrix& a_raw, const CVector& b_raw, std::vector<PoleSpec> poles) {
  if (a_raw.rows() != a_raw.cols() || b_raw.size() != a_raw.rows()) {
    throw DimensionError("normalize_filter: A must be n×n and b of length n");
  }
  const quad::Matrix a = quad::from_double(a_raw);
  const quad::Matrix b = quad::from_double(b_raw);
  const quad::Matrix e = solve_discrete_lyapunov(a, (b * b.adjoint()).eval());
  const auto [root, inv_root] = hermitian_sqrt_pair(e, quad::Real(kGramianMinRatio));
  const quad::Matrix a_norm = inv_root * a * root;
  const quad::Matrix b_norm = inv_root * b;
  return GFilter(quad::to_double(a_norm), quad::to_double(b_norm).col(0), std::move(poles));
}

GFilter design_filter(const std::vector<PoleSpec>& poles) {
  bool all_zero = true;
  for (const auto& p : poles) all_zero = all_zero && p.modulus == 0.0;
  if (all_zero && poles.size() == 1) {
    auto f = delay_filter(poles.front().multiplicity);
    return GFilter(f.a(), f.b(), poles);
  }
  auto [a, b] = build_jordan_filter(poles);
  return normalize_filter(a, b, poles);
}

GFilter delay_filter(Index n) {
  if (n < 1) throw ArgumentError("delay_filter: size must be >= 1");
  auto [a, b] = build_jordan_filter({PoleSpec{0.0, 0.0, static_cast<int>(n)}});
  return GFilter(a, b, {PoleSpec{0.0, 0.0, static_cast<int>(n)}});
}

std::vector<PoleSpec> g1_poles() { return {PoleSpec{0.58, 2.0, 20}}; }
std::vector<PoleSpec> g2_poles() { return {PoleSpec{0.58, 1.7, 10}, PoleSpec{0.58, 3.3, 10}}; }
GFilter g1_filter() { return design_filter(g1_poles()); }
GFilter g2_filter() { return design_filter(g2_poles()); }

CVector transfer_vector(const GFilter& f, double theta) { return f.transfer(theta); }

std::vector<GainPoint> squared_gain_profile(const GFilter& f, Index grid_size) {
  if (grid_size < 2) throw ArgumentError("squared_gain_profile: grid_size must be >= 2");
  std::vector<GainPoint> out;
  out.reserve(static_cast<std::size_t>(grid_size));
  for (Index k = 0; k < grid_size; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid_size);
    out.push_back({theta, f.transfer(theta).squaredNorm()});
  }
  return out;
}

Index transient_length(const GFilter& f, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ArgumentError("transient_length: epsilon must lie in (0, 1)");
  }
  CMatrix power = f.a();
  for (Index k = 1; k <= kMaxTransientIterations; ++k) {
    if (spectral_norm(power) < epsilon) return k;
    power = (power * f.a()).eval();
  }
  throw StabilityError("transient_length: no decay within the iteration cap");
}

OutputMatrix apply_filter_skip(const GFilter& f, const CVector& y, Index discard) {
  const Index length = y.size();
  if (discard < 0) throw ArgumentError("apply_filter: negative transient count");
  if (length <= discard) {
    throw InsufficientDataError("apply_filter: signal of length " + std::to_string(length) +
                                    " leaves no state after discarding " + std::to_string(discard) +
                                    "; need at least " + std::to_string(discard + 1) + " samples",
                                discard + 1);
  }
  OutputMatrix out;
  out.discarded = discard;
  out.x.resize(f.size(), length - discard);
  CVector state = CVector::Zero(f.size());
  for (Index t = 0; t < length; ++t) {
    state = (f.a() * state + f.b() * y(t)).eval();
    if (t >= discard) out.x.col(t - discard) = state;
  }
  return out;
}

OutputMatrix apply_filter(const GFilter& f, const CVector& y, double epsilon) {
  return apply_filter_skip(f, y, transient_length(f, epsilon));
}

Index reachability_rank(const CMatrix& a, const CVector& b) {
  const CMatrix gram = solve_discrete_lyapunov(a, (b * b.adjoint()).eval());
  const RVector values = hermitian_eig(gram).values;
  const double top = values(0);
  if (!(top > 0.0)) return 0;
  return (values.array() > kReachabilityTol * top).count();
}

}  // namespace gfanm
