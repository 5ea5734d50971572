#ifndef PMULAB_PMU_PIPELINE_HPP
#define PMULAB_PMU_PIPELINE_HPP

#include <complex>
#include <span>
#include <vector>

#include "pmulab/types.hpp"

namespace pmulab {

/// One complex phasor estimate, stamped at the center of its DFT window.
struct PhasorPoint {
  double timestamp = 0.0;
  double xr = 0.0;
  double xi = 0.0;

  double amplitude() const { return std::hypot(xr, xi); }
  double phase() const { return std::atan2(xi, xr); }
};

/// Uniformly spaced phasor estimates.
struct PhasorSeries {
  double rate = 0.0;  // [Hz]
  std::vector<PhasorPoint> points;

  std::size_t size() const { return points.size(); }
  std::vector<double> amplitudes() const;
  std::vector<double> timestamps() const;
};

struct LpfSpec {
  double cutoff = 60.0;  // [Hz]
  int taps = 129;        // odd
};

/// Configuration of the simulated measurement chain. internal_rate = 0 means
/// "use the waveform sample rate" (one-sample window hop).
struct PmuConfig {
  int n_cycles = 1;
  double f_nominal = 60.0;
  double internal_rate = 0.0;
  LpfSpec lpf{};
  double report_rate = 30.0;

  void validate() const;
};

/// N-cycle DFT phasor of the window [window_start, window_start + N/f1],
/// timestamped at the window center. Windows that do not line up with the
/// sample grid are resampled by cubic interpolation.
PhasorPoint dft_phasor(const SampledWaveform& w, double window_start, int n_cycles, double f1);

/// Sliding-window DFT over the whole record, hopping at cfg.internal_rate.
PhasorSeries phasor_stream(const SampledWaveform& w, const PmuConfig& cfg);

/// Linear-phase Hamming windowed-sinc low-pass applied independently to the
/// real and imaginary parts. The (taps-1)/2 group delay is compensated by
/// re-using the input timestamps of the valid region, so the first and last
/// (taps-1)/2 points are dropped.
PhasorSeries apply_lpf(const PhasorSeries& s, double cutoff, int taps);

/// Decimation to the reporting rate by nearest-sample selection (no
/// interpolation); output points sit on the uniform reporting grid.
PhasorSeries report(const PhasorSeries& s, double fps);

/// Frequency a reported oscillation folds to: |f_os - fps*round(f_os/fps)|,
/// always in [0, fps/2].
double alias_frequency(double f_os, double fps);

struct PmuSimResult {
  PhasorSeries raw;
  PhasorSeries filtered;
  PhasorSeries reported;
};

/// Full chain: phasor_stream -> apply_lpf -> report.
PmuSimResult simulate_pmu(const SampledWaveform& w, const PmuConfig& cfg);

/// Single-sided magnitude spectrum of a real series; an exact-bin sinusoid of
/// amplitude c reports magnitude c.
struct SpectrumPoint {
  double frequency = 0.0;
  double magnitude = 0.0;
};
std::vector<SpectrumPoint> spectrum(std::span<const double> values, double rate);

/// Largest-magnitude spectrum point with frequency >= f_min.
SpectrumPoint dominant_peak(std::span<const SpectrumPoint> spec, double f_min);

/// Windowed-sinc low-pass coefficients (Hamming window, unity DC gain).
std::vector<double> design_lowpass(double cutoff, int taps, double rate);

}  // namespace pmulab

#endif
