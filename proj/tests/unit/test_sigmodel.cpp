#include <doctest.h>

#include <numbers>

#include "gfanm/sigmodel.hpp"

using namespace gfanm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("noiseless cisoids") {
  const CVector dc = generate_signal(CisoidSpec{{1.0}, {0.0}}, 3);
  for (Index t = 0; t < 3; ++t) CHECK(std::abs(dc(t) - 1.0) < 1e-15);

  const CVector nyq = generate_signal(CisoidSpec{{1.0}, {kPi}}, 4);
  const double want[] = {1.0, -1.0, 1.0, -1.0};
  for (Index t = 0; t < 4; ++t) CHECK(std::abs(nyq(t) - want[t]) < 1e-14);

  const CisoidSpec three{{{0.5, 0.2}, {-1.0, 0.0}, {0.0, 2.0}}, {0.3, 1.1, 4.0}};
  const CVector y = generate_signal(three, 500);
  double bound = 0.0;
  for (const auto& a : three.amplitudes) bound += std::abs(a);
  CHECK(y.cwiseAbs().maxCoeff() <= bound + 1e-12);
}

TEST_CASE("CisoidSpec validation") {
  CHECK_THROWS_AS(generate_signal(CisoidSpec{{1.0, 1.0}, {0.5}}, 4), ArgumentError);
  CHECK_THROWS_AS(generate_signal(CisoidSpec{{1.0, 1.0}, {0.5, 0.5}}, 4), ArgumentError);
  CHECK_THROWS_AS(generate_signal(CisoidSpec{{1.0}, {0.5}}, 0), ArgumentError);
  CHECK_THROWS_AS(generate_signal(CisoidSpec{{1.0}, {0.5}}, 4, NoiseSpec{0.0, 1}), ArgumentError);
}

TEST_CASE("noise statistics") {
  const Index length = 100000;
  const CVector w = generate_signal(CisoidSpec{}, length, NoiseSpec{1.0, 42});
  const std::complex<double> mean = w.mean();
  double re2 = 0.0, im2 = 0.0;
  for (Index t = 0; t < length; ++t) {
    re2 += std::pow(w(t).real() - mean.real(), 2);
    im2 += std::pow(w(t).imag() - mean.imag(), 2);
  }
  re2 /= static_cast<double>(length - 1);
  im2 /= static_cast<double>(length - 1);
  CHECK(std::abs(re2 + im2 - 1.0) < 0.02);
  CHECK(std::abs(re2 - 0.5) < 0.02);
  CHECK(std::abs(im2 - 0.5) < 0.02);
  CHECK(std::abs(mean) < 0.02);
}

TEST_CASE("determinism and seed sensitivity") {
  const CisoidSpec spec{{{1.0, 0.5}}, {1.3}};
  const CVector a = generate_signal(spec, 64, NoiseSpec{0.3, 9});
  const CVector b = generate_signal(spec, 64, NoiseSpec{0.3, 9});
  const CVector c = generate_signal(spec, 64, NoiseSpec{0.3, 10});
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("empirical SNR matches the request") {
  for (double snr : {-3.0, 0.0, 6.0}) {
    const double amp = 2.0;
    const Index length = 20000;
    const CisoidSpec spec{{std::polar(amp, 0.4)}, {2.0}};
    const CVector clean = generate_signal(spec, length);
    const CVector noisy = generate_signal(spec, length, NoiseSpec{snr_to_sigma2(snr, amp), 77});
    const double ps = clean.squaredNorm() / static_cast<double>(length);
    const double pw = (noisy - clean).squaredNorm() / static_cast<double>(length);
    CHECK(std::abs(10.0 * std::log10(ps / pw) - snr) < 0.5);
  }
}

TEST_CASE("phases are drawn before noise") {
  Rng r1(5);
  const auto amps = random_phase_amplitudes(3, 2.0, r1);
  const CVector y1 = generate_signal(CisoidSpec{amps, {1.0, 2.0, 3.0}}, 32, 0.5, r1);
  Rng r2(5);
  const auto amps2 = random_phase_amplitudes(3, 2.0, r2);
  CHECK(amps == amps2);
  for (const auto& a : amps) CHECK(std::abs(a) == doctest::Approx(2.0));
  const CVector y2 = generate_signal(CisoidSpec{amps2, {1.0, 2.0, 3.0}}, 32, 0.5, r2);
  CHECK(y1 == y2);
  CHECK(kRngName == "mt19937_64+std::normal_distribution");
}

TEST_CASE("snr_to_sigma2") {
  CHECK(snr_to_sigma2(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(snr_to_sigma2(6.0, 2.0) == doctest::Approx(1.00475).epsilon(1e-5));
  CHECK(snr_to_sigma2(-3.0, 1.0) == doctest::Approx(1.99526).epsilon(1e-5));
  CHECK_THROWS_AS(snr_to_sigma2(0.0, 0.0), ArgumentError);
}

TEST_CASE("fft_resolution") {
  CHECK(fft_resolution(117) == doctest::Approx(0.05370).epsilon(1e-4));
  CHECK(fft_resolution(117) == 2.0 * kPi / 117.0);
  CHECK(fft_resolution(4) == doctest::Approx(kPi / 2.0));
  CHECK(fft_resolution(1000000) == 2.0 * kPi / 1000000.0);
  CHECK_THROWS_AS(fft_resolution(0), ArgumentError);
}

TEST_CASE("experiment_frequencies") {
  const auto three = experiment_frequencies(2.0, Layout::three_spaced, 117);
  REQUIRE(three.size() == 3);
  CHECK(three[0] == doctest::Approx(1.89259).epsilon(1e-5));
  CHECK(three[1] == 2.0);
  CHECK(three[2] == doctest::Approx(2.10741).epsilon(1e-5));

  const auto two = experiment_frequencies(2.0, Layout::two_close, 117);
  REQUIRE(two.size() == 2);
  CHECK(two[1] - two[0] == doctest::Approx(2.0 * kPi / 117.0).epsilon(1e-12));

  const auto spaced = experiment_frequencies(2.0, Layout::two_spaced, 117);
  CHECK(spaced[1] - spaced[0] == doctest::Approx(4.0 * kPi / 117.0).epsilon(1e-12));

  const auto sym = experiment_frequencies(kPi, Layout::three_spaced, 64);
  CHECK(sym[0] + sym[2] == doctest::Approx(2.0 * kPi));

  CHECK_THROWS_AS(experiment_frequencies(0.01, Layout::three_spaced, 117), ArgumentError);
  CHECK_THROWS_AS(experiment_frequencies(2.0 * kPi - 0.01, Layout::two_close, 117), ArgumentError);
}
