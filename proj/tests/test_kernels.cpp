#include <doctest.h>

#include <cmath>
#include <random>

#include "pmulab/kernels.hpp"

using namespace pmulab;

namespace {

SampledWaveform random_record(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SampledWaveform w;
  w.fs = 2000.0;
  w.samples.resize(n);
  for (auto& v : w.samples) v = dist(rng);
  return w;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  const auto w = random_record(4096, 7);

  std::vector<double> starts;
  for (double tau = 0.0; tau < 1.9; tau += 0.011) starts.push_back(tau);
  const auto par = kernels::sliding_dft(w, starts, 1, 60.0);
  const auto ser = kernels::sliding_dft_serial(w, starts, 1, 60.0);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i] == ser[i]);

  std::vector<double> h(129);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::sin(0.1 * static_cast<double>(i + 1));
  const auto cp = kernels::convolve_valid(w.samples, h);
  const auto cs = kernels::convolve_valid_serial(w.samples, h);
  REQUIRE(cp.size() == cs.size());
  for (std::size_t i = 0; i < cp.size(); ++i) CHECK(cp[i] == cs[i]);

  const auto mp = kernels::dft_magnitudes(w.samples);
  const auto ms = kernels::dft_magnitudes_serial(w.samples);
  REQUIRE(mp.size() == ms.size());
  for (std::size_t i = 0; i < mp.size(); ++i) CHECK(mp[i] == ms[i]);
}

TEST_CASE("window phasor is exact for an on-grid integer-cycle tone") {
  SampledWaveform w;
  w.fs = 7680.0;
  w.samples.resize(7680);
  for (std::size_t k = 0; k < w.samples.size(); ++k)
    w.samples[k] = 2.0 * std::cos(kTwoPi * 60.0 * w.time_at(k) + kPi / 4.0);

  const auto x = kernels::window_phasor(w, 10.0 / w.fs, 1, 60.0);
  CHECK(std::abs(std::abs(x) - 2.0) < 1e-12);
  CHECK(std::abs(std::arg(x) - kPi / 4.0) < 1e-12);
}

TEST_CASE("window phasor rejects bad windows") {
  const auto w = random_record(256, 3);
  CHECK_THROWS_AS(kernels::window_phasor(w, -1.0, 1, 60.0), InputError);
  CHECK_THROWS_AS(kernels::window_phasor(w, 0.12, 1, 60.0), InputError);  // runs past the end
  CHECK_THROWS_AS(kernels::window_phasor(w, 0.0, 0, 60.0), InputError);
  SampledWaveform coarse;
  coarse.fs = 120.0;  // two samples per cycle
  coarse.samples.assign(64, 0.0);
  CHECK_THROWS_AS(kernels::window_phasor(coarse, 0.0, 1, 60.0), InputError);
}

TEST_CASE("convolution argument checks") {
  std::vector<double> x(8, 1.0), h(9, 1.0);
  CHECK_THROWS_AS(kernels::convolve_valid(x, h), InputError);
  CHECK_THROWS_AS(kernels::dft_magnitudes(std::vector<double>(5, 1.0)), InputError);
}

TEST_CASE("goertzel bin recovers amplitude and phase on integer periods") {
  const double rate = 200.0, f = 8.0;
  std::vector<double> x(400);
  for (std::size_t k = 0; k < x.size(); ++k)
    x[k] = 1.5 * std::cos(kTwoPi * f * static_cast<double>(k) / rate + 0.7);
  const auto z = kernels::goertzel_bin(x, rate, 0.0, f);
  CHECK(std::abs(std::abs(z) - 1.5) < 1e-12);
  CHECK(std::abs(std::arg(z) - 0.7) < 1e-12);
}
