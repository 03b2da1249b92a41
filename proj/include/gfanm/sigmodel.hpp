#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "gfanm/numkernel.hpp"

namespace gfanm {

/// Sum of m cisoids a_k e^{iθ_k t}.
struct CisoidSpec {
  std::vector<std::complex<double>> amplitudes;
  std::vector<double> frequencies;

  std::size_t count() const noexcept { return frequencies.size(); }
  /// Throws ArgumentError on length mismatch or repeated frequencies.
  void validate() const;
};

/// Circular complex white Gaussian noise of total variance σ².
struct NoiseSpec {
  double variance = 1.0;
  std::uint64_t seed = 0;
};

/// Generator used for all randomness in the library.
using Rng = std::mt19937_64;
inline constexpr std::string_view kRngName = "mt19937_64+std::normal_distribution";

/// y(t) = Σ a_k e^{iθ_k t} + w(t), t = 0..L-1.
CVector generate_signal(const CisoidSpec& spec, Index length,
                        const std::optional<NoiseSpec>& noise = std::nullopt);

/// Same as generate_signal but draws the noise from an existing stream.
CVector generate_signal(const CisoidSpec& spec, Index length, double variance, Rng& rng);

/// σ² = |a|² 10^{-SNR/10}.
double snr_to_sigma2(double snr_db, double amplitude_modulus);

/// 2π / L.
double fft_resolution(Index length);

enum class Layout { three_spaced, two_close, two_spaced };

/// Three lines spaced 2Δ around θ₀, two lines at θ₀ ± Δ/2, or two lines at
/// θ₀ ± Δ (Δ = 2π/L).
std::vector<double> experiment_frequencies(double theta0, Layout layout, Index length);

/// Amplitudes modulus·e^{iφ_k}, φ_k ~ U[0, 2π), drawn in index order.
std::vector<std::complex<double>> random_phase_amplitudes(std::size_t count, double modulus,
                                                          Rng& rng);

}  // namespace gfanm
