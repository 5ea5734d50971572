#ifndef PMULAB_SIGNAL_MODEL_HPP
#define PMULAB_SIGNAL_MODEL_HPP

#include <optional>
#include <vector>

#include "pmulab/types.hpp"

namespace pmulab {

/// Carrier with a cosine-modulated amplitude envelope:
///   v(t) = A * [1 + m*cos(2*pi*f_os*t + phi2)] * cos(2*pi*f1*t + phi1)
/// Amplitudes are peak values, not RMS.
struct AmplitudeModSignal {
  double f1 = 60.0;   // fundamental frequency [Hz]
  double A = 1.0;     // fundamental amplitude (peak)
  double phi1 = 0.0;  // fundamental initial phase [rad]
  double m = 0.0;     // modulation depth (per-unit of A)
  double f_os = 0.0;  // oscillation frequency [Hz]
  double phi2 = 0.0;  // oscillation initial phase [rad]

  void validate() const;
  double envelope(double t) const;
  double value(double t) const;
};

/// General oscillation model: carrier plus explicit sub-/super-synchronous
/// components at f1 -/+ f_os, all three sharing a common angle modulation
/// h*cos(2*pi*f_os*t + phi_os).
struct GeneralOscSignal {
  double a = 1.0;       // carrier amplitude (peak)
  double f1 = 60.0;     // carrier frequency [Hz]
  double phi1 = 0.0;    // carrier phase [rad]
  double f_os = 0.0;    // oscillation frequency [Hz]
  double phi_os = 0.0;  // angle-modulation phase [rad]
  double h = 0.0;       // angle-modulation depth [rad]
  double b1 = 0.0;      // sub-synchronous amplitude (at f1 - f_os)
  double phi_sub = 0.0;
  double b2 = 0.0;      // super-synchronous amplitude (at f1 + f_os)
  double phi_sup = 0.0;

  // f_os must satisfy 0 < f_os < f1 whenever any modulation term is active
  // (b1, b2 or h nonzero); the degenerate pure-tone case tolerates f_os = 0.
  void validate() const;
  double value(double t) const;
};

/// GeneralOscSignal restricted to h = 0.
struct ThreeComponentSignal {
  double a = 1.0;
  double f1 = 60.0;
  double phi1 = 0.0;
  double f_os = 0.0;
  double b1 = 0.0;
  double phi_sub = 0.0;
  double b2 = 0.0;
  double phi_sup = 0.0;

  void validate() const;
  double value(double t) const;
  GeneralOscSignal with_angle_mod(double h, double phi_os) const;
};

/// Rectangular (cos/sin) coefficients of the three-component model:
///   y(t) = A1 cos(w1 t) + B1 sin(w1 t) + A2 cos(w- t) + B2 sin(w- t)
///        + A3 cos(w+ t) + B3 sin(w+ t),  w-/w+ = 2*pi*(f1 -/+ f_os).
struct RectCoefficients {
  double A1 = 0.0, B1 = 0.0;
  double A2 = 0.0, B2 = 0.0;
  double A3 = 0.0, B3 = 0.0;
  double f1 = 60.0;
  double f_os = 0.0;

  double value(double t) const;
};

/// Outcome of the phasor-representability check of a three-component signal.
/// A signal is exactly representable as [a + b*cos(2*pi*f_os*t + phi2)] *
/// cos(2*pi*f1*t + phi1) iff b1 == b2 and phi_sub + phi_sup == 2*phi1 (mod 2*pi).
struct RepresentabilityReport {
  double b1 = 0.0;
  double b2 = 0.0;
  double amplitude_asymmetry = 0.0;          // |b1-b2| / max(b1,b2), in [0,1]
  double phase_residual = 0.0;               // wrap(phi_sub + phi_sup - 2*phi1), in (-pi,pi]
  double equivalent_b = 0.0;                 // 2*b1
  double equivalent_phi2 = 0.0;              // wrap(phi_sup - phi1)
  std::optional<double> fit_error_pct;       // best envelope-model fit error [%], empty on divergence
  bool representable = false;                // both analytic conditions within 1e-6
};

SampledWaveform synthesize_am(const AmplitudeModSignal& p, double fs, double duration,
                              double t0 = 0.0);
SampledWaveform synthesize_general(const GeneralOscSignal& p, double fs, double duration,
                                   double t0 = 0.0);

/// Polar form of rectangular coefficients. Phase convention is fixed by the
/// expansion A = amp*cos(phi), B = -amp*sin(phi), i.e. phi = atan2(-B, A),
/// which makes polar_to_rect(rect_to_polar(r)) == r. Zero amplitude yields
/// phase 0 (degenerate).
ThreeComponentSignal rect_to_polar(const RectCoefficients& r);
RectCoefficients polar_to_rect(const ThreeComponentSignal& p);

/// Analytic symmetry checks plus a Gauss-Newton fit of the single-envelope
/// model to a waveform synthesized from `p` (fs/duration control the grid the
/// fit runs on). Fit divergence leaves fit_error_pct empty.
RepresentabilityReport check_representability(const ThreeComponentSignal& p, double fs,
                                              double duration);

/// Per-sample magnitude/phase of three-phase data via the alpha-beta (Clarke)
/// transform; phase convention is atan2(-beta, alpha), 0 when the magnitude
/// vanishes.
struct ClarkeSeries {
  double fs = 0.0;
  double t0 = 0.0;
  std::vector<double> magnitude;
  std::vector<double> phase;
};
ClarkeSeries clarke_magnitude(const SampledWaveform& va, const SampledWaveform& vb,
                              const SampledWaveform& vc);

}  // namespace pmulab

#endif
