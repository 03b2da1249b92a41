#include "gfanm/sigmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gfanm {

void CisoidSpec::validate() const {
  if (amplitudes.size() != frequencies.size()) {
    throw ArgumentError("CisoidSpec: amplitude and frequency lists differ in length");
  }
  std::vector<double> sorted = frequencies;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("CisoidSpec: frequencies must be pairwise distinct");
  }
}

namespace {

CVector cisoid_sum(const CisoidSpec& spec, Index length) {
  spec.validate();
  if (length < 1) throw ArgumentError("generate_signal: length must be >= 1");
  CVector y = CVector::Zero(length);
  for (std::size_t k = 0; k < spec.count(); ++k) {
    for (Index t = 0; t < length; ++t) {
      y(t) += spec.amplitudes[k] * std::polar(1.0, spec.frequencies[k] * static_cast<double>(t));
    }
  }
  return y;
}

}  // namespace

CVector generate_signal(const CisoidSpec& spec, Index length, double variance, Rng& rng) {
  CVector y = cisoid_sum(spec, length);
  if (variance > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    for (Index t = 0; t < length; ++t) {
      const double re = normal(rng);
      const double im = normal(rng);
      y(t) += std::complex<double>(re, im);
    }
  }
  return y;
}

CVector generate_signal(const CisoidSpec& spec, Index length,
                        const std::optional<NoiseSpec>& noise) {
  if (!noise) return cisoid_sum(spec, length);
  if (!(noise->variance > 0.0)) throw ArgumentError("NoiseSpec: variance must be positive");
  Rng rng(noise->seed);
  return generate_signal(spec, length, noise->variance, rng);
}

double snr_to_sigma2(double snr_db, double amplitude_modulus) {
  if (!(amplitude_modulus > 0.0)) throw ArgumentError("snr_to_sigma2: amplitude must be positive");
  return amplitude_modulus * amplitude_modulus * std::pow(10.0, -snr_db / 10.0);
}

double fft_resolution(Index length) {
  if (length < 1) throw ArgumentError("fft_resolution: length must be >= 1");
  return 2.0 * std::numbers::pi / static_cast<double>(length);
}

std::vector<double> experiment_frequencies(double theta0, Layout layout, Index length) {
  const double delta = fft_resolution(length);
  std::vector<double> out;
  switch (layout) {
    case Layout::three_spaced:
      out = {theta0 - 2.0 * delta, theta0, theta0 + 2.0 * delta};
      break;
    case Layout::two_close:
      out = {theta0 - delta / 2.0, theta0 + delta / 2.0};
      break;
    case Layout::two_spaced:
      out = {theta0 - delta, theta0 + delta};
      break;
  }
  for (double theta : out) {
    if (!(theta >= 0.0 && theta < 2.0 * std::numbers::pi)) {
      throw ArgumentError("experiment_frequencies: frequency " + std::to_string(theta) +
                          " falls outside [0, 2π)");
    }
  }
  return out;
}

std::vector<std::complex<double>> random_phase_amplitudes(std::size_t count, double modulus,
                                                          Rng& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<std::complex<double>> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(std::polar(modulus, phase(rng)));
  return out;
}

}  // namespace gfanm
