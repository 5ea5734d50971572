#ifndef PMULAB_MODAL_HPP
#define PMULAB_MODAL_HPP

#include <span>
#include <vector>

#include "pmulab/types.hpp"

namespace pmulab {

/// One extracted real mode: amplitude*exp(damping*t)*cos(2*pi*frequency*t + phase).
/// Conjugate pairs are collapsed, so frequency >= 0.
struct Mode {
  double frequency = 0.0;  // [Hz]
  double damping = 0.0;    // [1/s], negative decays
  double amplitude = 0.0;  // series units
  double phase = 0.0;      // [rad]
  bool flagged = false;    // residue system was rank deficient
};

/// Matrix Pencil extraction of damped sinusoids from a uniformly sampled
/// real series. The mean is removed before building the Hankel pencil and
/// restored afterwards as a 0-Hz mode. Model order is chosen by the relative
/// singular-value threshold energy_tol; 1e-8 suits noise-free data, 1e-3 is
/// a reasonable setting for noisy records.
std::vector<Mode> matrix_pencil(std::span<const double> samples, double rate,
                                double pencil_ratio = 1.0 / 3.0, double energy_tol = 1e-8);

/// Largest-amplitude mode with frequency strictly inside (f_min, f_max);
/// ties go to the lowest frequency. Throws NumericalError when the band is
/// empty.
Mode dominant_mode(std::span<const Mode> modes, double f_min, double f_max);

}  // namespace pmulab

#endif
