#include <doctest.h>

#include <cmath>
#include <random>

#include "pmulab/gain_analysis.hpp"

using namespace pmulab;

TEST_CASE("gain formula reference points") {
  for (int n = 1; n <= 6; ++n) CHECK(f_gain(60.0, 0.0, n) == 1.0);
  CHECK(f_gain(60.0, 20.0, 1) == doctest::Approx(0.80).epsilon(0.0063));
  CHECK(f_gain(60.0, 20.0, 3) == 0.0);  // sin(pi) zero
  CHECK(f_gain(60.0, 14.0, 4) == doctest::Approx(0.07).epsilon(0.072));
  CHECK_THROWS_AS(f_gain(60.0, -1.0, 1), InputError);
  CHECK_THROWS_AS(f_gain(0.0, 1.0, 1), InputError);
}

TEST_CASE("gain limits") {
  for (int n = 1; n <= 6; ++n) CHECK(std::abs(f_gain(60.0, 1e-6, n) - 1.0) < 1e-9);
  // removable singularity at f_os = 2*f1
  for (int n : {1, 2, 5}) {
    CHECK(f_gain(60.0, 120.0, n) == doctest::Approx(0.5));
    CHECK(f_gain(60.0, 120.0 - 1e-6, n) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(f_gain(60.0, 120.0 + 1e-6, n) == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("gain sign follows the sine factor below sqrt(2) f1") {
  for (int n = 1; n <= 6; ++n) {
    for (double f = 0.25; f < std::sqrt(2.0) * 60.0; f += 0.25) {
      const double s = std::sin(kPi * f * n / 60.0);
      if (std::abs(s) < 1e-9) continue;
      CHECK(std::signbit(f_gain(60.0, f, n)) == std::signbit(s));
    }
  }
}

TEST_CASE("attenuation grows with window length at fixed low f_os") {
  for (double f : {0.5, 2.0, 5.0, 8.0, 9.9}) {
    double prev = 1.0;
    for (int n = 1; n <= 6; ++n) {
      const double g = std::abs(f_gain(60.0, f, n));
      CHECK(g <= prev + 1e-12);
      prev = g;
    }
  }
}

TEST_CASE("flip frequencies are the window-length harmonics") {
  CHECK(flip_frequencies(60.0, 1, 100.0) == std::vector<double>{60.0});
  CHECK(flip_frequencies(60.0, 5, 25.0) == std::vector<double>{12.0, 24.0});
  CHECK(flip_frequencies(60.0, 6, 12.0) == std::vector<double>{10.0});
  // the sine zero at f_os = 2 f1 cancels against the rational factor
  CHECK(flip_frequencies(60.0, 1, 130.0) == std::vector<double>{60.0});
  CHECK_THROWS_AS(flip_frequencies(60.0, 1, 10.0), InputError);
}

TEST_CASE("predicted amplitude is constant without modulation") {
  AmplitudeModSignal p{60.0, 2.0, 0.2, 0.0, 0.0, 0.0};
  for (double tau : {0.0, 0.01, 0.3}) {
    CHECK(predicted_amplitude(p, 1, tau) == doctest::Approx(2.0));
    CHECK(predicted_amplitude_exact(p, 1, tau) == doctest::Approx(2.0));
  }
}

namespace {

// independent quadrature oracle: Simpson integration of the windowed
// continuous-time transform of the modulated signal
double window_amplitude_quadrature(const AmplitudeModSignal& p, int n_cycles, double tau) {
  const double span = static_cast<double>(n_cycles) / p.f1;
  const int steps = 20000;  // even
  const double dt = span / steps;
  double xr = 0.0, xi = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double t = tau + i * dt;
    const double v = p.value(t);
    const double weight = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    xr += weight * v * std::cos(kTwoPi * p.f1 * t);
    xi += weight * v * std::sin(kTwoPi * p.f1 * t);
  }
  const double scale = 2.0 * p.f1 / static_cast<double>(n_cycles) * dt / 3.0;
  return std::hypot(scale * xr, scale * xi);
}

}  // namespace

TEST_CASE("exact predicted amplitude matches the window integral") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> fos(1.0, 90.0);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  std::uniform_real_distribution<double> tau_d(0.0, 0.2);
  for (int trial = 0; trial < 12; ++trial) {
    AmplitudeModSignal p{60.0, 2.0, ph(rng), 0.05, fos(rng), ph(rng)};
    const int n = 1 + trial % 3;
    const double tau = tau_d(rng);
    const double oracle = window_amplitude_quadrature(p, n, tau);
    CHECK(predicted_amplitude_exact(p, n, tau) == doctest::Approx(oracle).epsilon(1e-9));
    // the ripple-free form drops the fast terms; its deviation stays within
    // the modulation scale and shrinks at low oscillation frequency
    const double bound = (p.f_os <= 10.0 ? 0.2 : 3.0) * p.m * p.A;
    CHECK(std::abs(predicted_amplitude(p, n, tau) - oracle) <= bound);
  }
}

TEST_CASE("slow-envelope gain of the exact expression") {
  // the f_os-frequency content of the exact window amplitude follows
  // sin(x)/x, not the closed-form table gain; both agree at low f_os
  CHECK(f_gain_exact(60.0, 0.0, 3) == 1.0);
  CHECK(f_gain_exact(60.0, 60.0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f_gain_exact(60.0, 40.0, 1) ==
        doctest::Approx(std::sin(2.0 * kPi / 3.0) / (2.0 * kPi / 3.0)).epsilon(1e-15));
  CHECK(std::abs(f_gain(60.0, 2.0, 1) - f_gain_exact(60.0, 2.0, 1)) < 3e-4);
  CHECK(std::abs(f_gain(60.0, 5.0, 1) - f_gain_exact(60.0, 5.0, 1)) < 2e-3);
  // divergence at high oscillation frequency
  CHECK(std::abs(f_gain(60.0, 40.0, 1) - f_gain_exact(60.0, 40.0, 1)) > 0.04);
}

TEST_CASE("applicability table rows") {
  const std::vector<int> n_list{1, 2, 3, 4, 5, 6};
  SUBCASE("5 Hz row") {
    const auto t = applicability_table(60.0, n_list, std::vector<double>{5.0});
    const std::vector<double> expect{99, 95, 90, 83, 74, 64};
    for (std::size_t c = 0; c < 6; ++c)
      CHECK(t.gain_pct[0][c] == doctest::Approx(expect[c]).epsilon(0.011));
  }
  SUBCASE("0.2 Hz row") {
    const auto t = applicability_table(60.0, n_list, std::vector<double>{0.2});
    for (std::size_t c = 0; c < 6; ++c) CHECK(t.gain_pct[0][c] >= 99.9);
  }
  SUBCASE("20 Hz row") {
    const auto t = applicability_table(60.0, std::vector<int>{1, 2, 3}, std::vector<double>{20.0});
    CHECK(t.gain_pct[0][0] == doctest::Approx(80.0).epsilon(0.01));
    CHECK(t.gain_pct[0][1] == doctest::Approx(40.0).epsilon(0.01));
    CHECK(t.gain_pct[0][2] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("timestamping phase error") {
  CHECK(timestamp_phase_error(5.0, 1, 60.0, 0.0) == 0.0);
  CHECK(timestamp_phase_error(5.0, 1, 60.0, end_of_window_offset(1, 60.0)) ==
        doctest::Approx(kPi / 12.0).epsilon(1e-15));
  CHECK(timestamp_phase_error(40.0, 2, 60.0, end_of_window_offset(2, 60.0)) ==
        doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
}

TEST_CASE("largest usable window length for a tolerance") {
  CHECK(max_window_cycles(60.0, 5.0, 0.2) == 4);   // N=5 already 26% down
  CHECK(max_window_cycles(60.0, 0.2, 0.01) == 12); // essentially unattenuated
  CHECK(max_window_cycles(60.0, 30.0, 0.05) == 0);
}

TEST_CASE("gain profile sweeps the requested grid") {
  const auto g = gain_profile(60.0, 2, 100.0, 0.5);
  CHECK(g.points.front().first == 0.0);
  CHECK(g.points.front().second == 1.0);
  CHECK(g.points.back().first == doctest::Approx(100.0));
  for (const auto& [f, gain] : g.points) CHECK(gain == f_gain(60.0, f, 2));
}
