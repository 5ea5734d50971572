#ifndef PMULAB_GAIN_ANALYSIS_HPP
#define PMULAB_GAIN_ANALYSIS_HPP

#include <span>
#include <utility>
#include <vector>

#include "pmulab/signal_model.hpp"

namespace pmulab {

/// Closed-form measurement gain of an N-cycle DFT for an amplitude-modulated
/// input: the oscillation depth m in the waveform shows up as m*f_gain in the
/// DFT amplitude. Signed; negative values mean the measured oscillation is
/// 180 degrees out of phase with the true envelope (phase flip).
///
///   f_gain = 2/(pi*N) * sin(pi*f_os*N/f1) * (2 f1^3 - f_os^2 f1)
///            / (f_os * (4 f1^2 - f_os^2))
///
/// The removable singularities are evaluated by their limits: 1 at f_os = 0
/// and 1/2 at f_os = 2*f1. This is the first-order expression the
/// applicability tables are built from; it folds part of the carrier-image
/// ripple into the slow gain and therefore overstates attenuation as
/// f_os grows. f_gain_exact gives the ripple-free gain implied by the exact
/// window integral, which is what a simulated DFT pipeline actually measures.
double f_gain(double f1, double f_os, int n_cycles);

/// Slow-envelope gain of the exact windowed integral: sin(x)/x with
/// x = pi*f_os*n_cycles/f1. Shares the zero crossings of f_gain.
double f_gain_exact(double f1, double f_os, int n_cycles);

/// Sampled gain curve over [0, f_max].
struct GainProfile {
  double f1 = 60.0;
  int n_cycles = 1;
  std::vector<std::pair<double, double>> points;  // (f_os, gain)
};
GainProfile gain_profile(double f1, int n_cycles, double f_max, double step);

/// DFT-estimated amplitude for an amplitude-modulated signal and a window
/// starting at tau:
///   A*[1 + m*f_gain*cos(2*pi*f_os*tau + pi*f_os*N/f1 + phi2)]
double predicted_amplitude(const AmplitudeModSignal& p, int n_cycles, double tau);

/// Unapproximated amplitude of the N-cycle window integral, ripple included.
double predicted_amplitude_exact(const AmplitudeModSignal& p, int n_cycles, double tau);

/// Oscillation frequencies at which the gain crosses zero: k*f1/N for
/// k = 1, 2, ... up to f_max, excluding f_os = 2*f1 where the zero of the
/// sine factor cancels against the rational factor.
std::vector<double> flip_frequencies(double f1, int n_cycles, double f_max);

/// Gains in percent (100*f_gain), one row per oscillation frequency and one
/// column per window length.
struct ApplicabilityTable {
  std::vector<int> n_cycles;
  std::vector<double> f_os;
  std::vector<std::vector<double>> gain_pct;  // [row][col]
};
ApplicabilityTable applicability_table(double f1, std::span<const int> n_list,
                                       std::span<const double> f_os_list);

/// Oscillation-phase error caused by stamping the phasor away from the
/// window center: 2*pi*f_os*offset. End-of-window stamping has offset
/// N/(2*f1), i.e. an error of pi*f_os*N/f1.
double timestamp_phase_error(double f_os, int n_cycles, double f1,
                             double stamp_offset_from_center);

/// Stamp offset of end-of-window timestamping: N/(2*f1).
double end_of_window_offset(int n_cycles, double f1);

/// Largest window length N in [1, n_max] keeping |1 - f_gain| within
/// `tolerance` at the given oscillation frequency; 0 if none qualifies.
int max_window_cycles(double f1, double f_os, double tolerance, int n_max = 12);

}  // namespace pmulab

#endif
