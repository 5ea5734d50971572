#include "pmulab/pmu_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "pmulab/kernels.hpp"

namespace pmulab {

std::vector<double> PhasorSeries::amplitudes() const {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = points[i].amplitude();
  return out;
}

std::vector<double> PhasorSeries::timestamps() const {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = points[i].timestamp;
  return out;
}

void PmuConfig::validate() const {
  if (n_cycles < 1) throw InputError("n_cycles must be >= 1");
  if (!(f_nominal > 0.0)) throw InputError("nominal frequency must be positive");
  if (internal_rate < 0.0) throw InputError("internal rate must be non-negative");
  if (!(report_rate > 0.0)) throw InputError("reporting rate must be positive");
  const double internal = internal_rate;
  if (internal > 0.0 && report_rate > internal)
    throw InputError("reporting rate exceeds internal phasor rate");
  if (lpf.taps < 1 || lpf.taps % 2 == 0) throw InputError("LPF taps must be a positive odd count");
  if (!(lpf.cutoff > 0.0)) throw InputError("LPF cutoff must be positive");
}

PhasorPoint dft_phasor(const SampledWaveform& w, double window_start, int n_cycles, double f1) {
  w.validate();
  const auto x = kernels::window_phasor(w, window_start, n_cycles, f1);
  PhasorPoint p;
  p.timestamp = window_start + static_cast<double>(n_cycles) / (2.0 * f1);
  p.xr = x.real();
  p.xi = x.imag();
  return p;
}

PhasorSeries phasor_stream(const SampledWaveform& w, const PmuConfig& cfg) {
  w.validate();
  cfg.validate();
  const double rate = cfg.internal_rate > 0.0 ? cfg.internal_rate : w.fs;
  if (cfg.report_rate > rate) throw InputError("reporting rate exceeds internal phasor rate");
  const double span = static_cast<double>(cfg.n_cycles) / cfg.f_nominal;
  if (w.duration() < span + 1.0 / rate) throw InputError("record too short for one DFT window");

  std::vector<double> starts;
  const double last_start = w.end_time() - span;
  starts.reserve(static_cast<std::size_t>((last_start - w.t0) * rate) + 1);
  for (std::size_t i = 0;; ++i) {
    const double tau = w.t0 + static_cast<double>(i) / rate;
    if (tau > last_start + 1e-12) break;
    starts.push_back(tau);
  }

  const auto phasors = kernels::sliding_dft(w, starts, cfg.n_cycles, cfg.f_nominal);
  PhasorSeries s;
  s.rate = rate;
  s.points.resize(starts.size());
  const double half = 0.5 * span;
  for (std::size_t i = 0; i < starts.size(); ++i)
    s.points[i] = PhasorPoint{starts[i] + half, phasors[i].real(), phasors[i].imag()};
  return s;
}

std::vector<double> design_lowpass(double cutoff, int taps, double rate) {
  if (taps < 3 || taps % 2 == 0) throw InputError("taps must be odd and >= 3");
  if (!(cutoff > 0.0) || cutoff >= rate / 2.0)
    throw InputError("cutoff must lie in (0, rate/2)");
  std::vector<double> h(taps);
  const double alpha = static_cast<double>(taps - 1) / 2.0;
  const double fc = 2.0 * cutoff / rate;
  double sum = 0.0;
  for (int n = 0; n < taps; ++n) {
    const double window = 0.54 - 0.46 * std::cos(kTwoPi * n / static_cast<double>(taps - 1));
    const double x = fc * (static_cast<double>(n) - alpha);
    const double sinc = x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
    h[n] = window * sinc * fc;
    sum += h[n];
  }
  for (auto& v : h) v /= sum;  // unity DC gain
  return h;
}

PhasorSeries apply_lpf(const PhasorSeries& s, double cutoff, int taps) {
  if (taps >= static_cast<int>(s.points.size()))
    throw InputError("filter longer than the phasor series");
  if (!(cutoff < s.rate / 2.0)) throw InputError("cutoff must be below the series Nyquist rate");
  const auto h = design_lowpass(cutoff, taps, s.rate);

  std::vector<double> xr(s.points.size()), xi(s.points.size());
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    xr[i] = s.points[i].xr;
    xi[i] = s.points[i].xi;
  }
  const auto yr = kernels::convolve_valid(xr, h);
  const auto yi = kernels::convolve_valid(xi, h);

  PhasorSeries out;
  out.rate = s.rate;
  out.points.resize(yr.size());
  const std::size_t delay = static_cast<std::size_t>(taps - 1) / 2;
  for (std::size_t i = 0; i < yr.size(); ++i)
    out.points[i] = PhasorPoint{s.points[i + delay].timestamp, yr[i], yi[i]};
  return out;
}

PhasorSeries report(const PhasorSeries& s, double fps) {
  if (s.points.empty()) throw InputError("empty phasor series");
  if (fps > s.rate) throw InputError("reporting rate exceeds series rate");
  PhasorSeries out;
  out.rate = fps;
  const double t_begin = s.points.front().timestamp;
  const double t_end = s.points.back().timestamp;
  for (std::size_t j = 0;; ++j) {
    const double t = t_begin + static_cast<double>(j) / fps;
    if (t > t_end + 1e-12) break;
    const auto idx = static_cast<std::size_t>(
        std::clamp<long long>(std::llround((t - t_begin) * s.rate), 0,
                              static_cast<long long>(s.points.size()) - 1));
    PhasorPoint p = s.points[idx];
    p.timestamp = t;
    out.points.push_back(p);
  }
  return out;
}

double alias_frequency(double f_os, double fps) {
  if (f_os < 0.0) throw InputError("f_os must be non-negative");
  if (!(fps > 0.0)) throw InputError("fps must be positive");
  return std::abs(f_os - fps * std::round(f_os / fps));
}

PmuSimResult simulate_pmu(const SampledWaveform& w, const PmuConfig& cfg) {
  PmuSimResult res;
  res.raw = phasor_stream(w, cfg);
  res.filtered = apply_lpf(res.raw, cfg.lpf.cutoff, cfg.lpf.taps);
  res.reported = report(res.filtered, cfg.report_rate);
  return res;
}

std::vector<SpectrumPoint> spectrum(std::span<const double> values, double rate) {
  if (!(rate > 0.0)) throw InputError("rate must be positive");
  const auto mags = kernels::dft_magnitudes(values);
  std::vector<SpectrumPoint> out(mags.size());
  for (std::size_t k = 0; k < mags.size(); ++k) {
    out[k].frequency = static_cast<double>(k) * rate / static_cast<double>(values.size());
    out[k].magnitude = mags[k];
  }
  return out;
}

SpectrumPoint dominant_peak(std::span<const SpectrumPoint> spec, double f_min) {
  SpectrumPoint best;
  bool found = false;
  for (const auto& p : spec) {
    if (p.frequency < f_min) continue;
    if (!found || p.magnitude > best.magnitude) {
      best = p;
      found = true;
    }
  }
  if (!found) throw InputError("no spectrum point at or above f_min");
  return best;
}

}  // namespace pmulab
