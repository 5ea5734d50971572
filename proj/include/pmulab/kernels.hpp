#ifndef PMULAB_KERNELS_HPP
#define PMULAB_KERNELS_HPP

#include <complex>
#include <span>
#include <vector>

#include "pmulab/types.hpp"

// Hot inner loops of the toolkit. Every kernel comes in two variants: the
// OpenMP-parallel one used by the library and a serial reference kept for
// testing and benchmarking. Both variants share the same per-element core,
// so their outputs are bitwise identical.
namespace pmulab::kernels {

/// Windowed single-frequency DFT of one window starting at `window_start`
/// spanning n_cycles/f1 seconds. The window integral is evaluated with the
/// trapezoidal rule so the effective window center coincides with the
/// analytic center window_start + n_cycles/(2 f1); nodes that fall off the
/// sample grid are obtained by cubic (Catmull-Rom) interpolation.
std::complex<double> window_phasor(const SampledWaveform& w, double window_start,
                                   int n_cycles, double f1);

/// One window_phasor per entry of `window_starts`.
std::vector<std::complex<double>> sliding_dft(const SampledWaveform& w,
                                              std::span<const double> window_starts,
                                              int n_cycles, double f1);
std::vector<std::complex<double>> sliding_dft_serial(const SampledWaveform& w,
                                                     std::span<const double> window_starts,
                                                     int n_cycles, double f1);

/// Valid-mode convolution: out[i] = sum_j h[j] * x[i + j],
/// out size = x.size() - h.size() + 1. Requires h.size() <= x.size().
std::vector<double> convolve_valid(std::span<const double> x, std::span<const double> h);
std::vector<double> convolve_valid_serial(std::span<const double> x, std::span<const double> h);

/// Single-sided magnitude spectrum of a real record via full-record DFT.
/// Bin k holds |X_k| scaled so that an exact-bin sinusoid of amplitude c
/// reports c (DC and Nyquist bins scaled by 1/M, interior bins by 2/M).
std::vector<double> dft_magnitudes(std::span<const double> x);
std::vector<double> dft_magnitudes_serial(std::span<const double> x);

/// Complex DFT coefficient of `x` at an arbitrary frequency, normalized so a
/// component c*cos(2*pi*f*t + phi) over an integer number of periods yields
/// c*exp(i*phi). Times are t[k] = t0 + k/rate.
std::complex<double> goertzel_bin(std::span<const double> x, double rate, double t0, double f);

}  // namespace pmulab::kernels

#endif
