#include "pmulab/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace pmulab::kernels {

namespace {

// Catmull-Rom interpolation on the uniform sample grid. Query points one
// sample away from either edge fall back to the nearest interior stencil.
double cubic_interp(const SampledWaveform& w, double t) {
  const double x = (t - w.t0) * w.fs;
  const auto n = static_cast<long>(w.samples.size());
  long i = static_cast<long>(std::floor(x));
  i = std::clamp(i, 1L, n - 3);
  const double u = x - static_cast<double>(i);
  const double p0 = w.samples[i - 1];
  const double p1 = w.samples[i];
  const double p2 = w.samples[i + 1];
  const double p3 = w.samples[i + 2];
  return 0.5 * (2.0 * p1 + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
}

bool near_integer(double x, double tol = 1e-9) { return std::abs(x - std::round(x)) < tol; }

}  // namespace

std::complex<double> window_phasor(const SampledWaveform& w, double window_start, int n_cycles,
                                   double f1) {
  if (n_cycles < 1) throw InputError("n_cycles must be >= 1");
  if (!(f1 > 0.0)) throw InputError("reference frequency must be positive");
  const double span = static_cast<double>(n_cycles) / f1;
  const double t_end = window_start + span;
  if (window_start < w.t0 - 0.5 / w.fs || t_end > w.end_time() + 0.5 / w.fs)
    throw InputError("DFT window outside the sampled record");

  const double k_exact = static_cast<double>(n_cycles) * w.fs / f1;
  const int K = std::max(4, static_cast<int>(std::llround(k_exact)));
  if (std::llround(k_exact) < 4) throw InputError("DFT window covers fewer than 4 samples");

  const bool on_grid = near_integer(k_exact) && near_integer((window_start - w.t0) * w.fs);
  const double dt = span / static_cast<double>(K);

  std::complex<double> acc{0.0, 0.0};
  long k0 = 0;
  if (on_grid) {
    k0 = std::llround((window_start - w.t0) * w.fs);
    if (k0 < 0 || k0 + K >= static_cast<long>(w.samples.size()))
      throw InputError("DFT window outside the sampled record");
  }
  for (int i = 0; i <= K; ++i) {
    const double t = window_start + static_cast<double>(i) * dt;
    const double v = on_grid ? w.samples[k0 + i] : cubic_interp(w, t);
    const double weight = (i == 0 || i == K) ? 0.5 : 1.0;
    const double ang = -kTwoPi * f1 * t;
    acc += weight * v * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return 2.0 / static_cast<double>(K) * acc;
}

std::vector<std::complex<double>> sliding_dft_serial(const SampledWaveform& w,
                                                     std::span<const double> window_starts,
                                                     int n_cycles, double f1) {
  std::vector<std::complex<double>> out(window_starts.size());
  for (std::size_t i = 0; i < window_starts.size(); ++i)
    out[i] = window_phasor(w, window_starts[i], n_cycles, f1);
  return out;
}

std::vector<std::complex<double>> sliding_dft(const SampledWaveform& w,
                                              std::span<const double> window_starts, int n_cycles,
                                              double f1) {
  std::vector<std::complex<double>> out(window_starts.size());
  const auto n = static_cast<long>(window_starts.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[i] = window_phasor(w, window_starts[i], n_cycles, f1);
  return out;
}

std::vector<double> convolve_valid_serial(std::span<const double> x, std::span<const double> h) {
  if (h.empty() || h.size() > x.size()) throw InputError("filter longer than the series");
  std::vector<double> out(x.size() - h.size() + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) acc += h[j] * x[i + j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> convolve_valid(std::span<const double> x, std::span<const double> h) {
  if (h.empty() || h.size() > x.size()) throw InputError("filter longer than the series");
  std::vector<double> out(x.size() - h.size() + 1);
  const auto n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) acc += h[j] * x[i + j];
    out[i] = acc;
  }
  return out;
}

namespace {

double magnitude_bin(std::span<const double> x, std::size_t k) {
  const std::size_t m = x.size();
  const double w0 = kTwoPi * static_cast<double>(k) / static_cast<double>(m);
  double re = 0.0, im = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    const double ang = w0 * static_cast<double>(n);
    re += x[n] * std::cos(ang);
    im -= x[n] * std::sin(ang);
  }
  const bool edge = (k == 0) || (2 * k == m);
  const double scale = (edge ? 1.0 : 2.0) / static_cast<double>(m);
  return scale * std::hypot(re, im);
}

}  // namespace

std::vector<double> dft_magnitudes_serial(std::span<const double> x) {
  if (x.size() < 8) throw InputError("spectrum needs at least 8 samples");
  std::vector<double> out(x.size() / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = magnitude_bin(x, k);
  return out;
}

std::vector<double> dft_magnitudes(std::span<const double> x) {
  if (x.size() < 8) throw InputError("spectrum needs at least 8 samples");
  std::vector<double> out(x.size() / 2 + 1);
  const auto n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) out[k] = magnitude_bin(x, static_cast<std::size_t>(k));
  return out;
}

std::complex<double> goertzel_bin(std::span<const double> x, double rate, double t0, double f) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double ang = -kTwoPi * f * (t0 + static_cast<double>(k) / rate);
    acc += x[k] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return 2.0 / static_cast<double>(x.size()) * acc;
}

}  // namespace pmulab::kernels
