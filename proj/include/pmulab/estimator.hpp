#ifndef PMULAB_ESTIMATOR_HPP
#define PMULAB_ESTIMATOR_HPP

#include "pmulab/modal.hpp"
#include "pmulab/pmu_pipeline.hpp"
#include "pmulab/signal_model.hpp"
#include "pmulab/types.hpp"

namespace pmulab {

/// Output of the multi-step estimation. `rect` holds the plain linear
/// least-squares coefficients of step 4 (angle modulation ignored); `params`
/// holds the final estimates after the nonlinear steps.
struct EstimationResult {
  GeneralOscSignal params;
  double f1_est = 0.0;
  double f_os_est = 0.0;   // 0 when no oscillation was detected
  RectCoefficients rect;
  double e_pow_pct = 0.0;
  double e_ls = 0.0;
  int iterations = 0;      // step-6 iteration count
  bool converged = false;
};

struct EstimateOptions {
  // Re-optimize all ten model parameters jointly at the end instead of only
  // the frequency/angle-modulation block.
  bool refine_all = false;
};

/// Step 1: fundamental frequency from the phase advance of one-cycle DFT
/// phasors hopped by one cycle. The per-window phases are unwrapped and a
/// least-squares line gives the mean advance; the procedure runs twice,
/// re-windowing at the refined frequency. Result must stay within
/// f_nominal +/- 5 Hz.
double estimate_fundamental(const SampledWaveform& w, double f_nominal);

/// Step 2: one-cycle DFT amplitudes over windows hopped by `hop_samples`.
PhasorSeries amplitude_curve(const SampledWaveform& w, double f1, int hop_samples);

/// Step 3: frequency of the dominant oscillatory Matrix Pencil mode of the
/// (DC-removed) amplitude curve. Throws NoOscillationError when the curve
/// carries no oscillatory mode.
double estimate_osc_frequency(const PhasorSeries& curve);

/// Step 4: linear least squares on the six-column cos/sin basis at
/// {f1, f1 - f_os, f1 + f_os} via QR. f_os in {0, f1} makes the basis
/// collinear and is rejected.
RectCoefficients linear_ls_fit(const SampledWaveform& w, double f1, double f_os);

/// Step 6: Levenberg-Marquardt over (h, phi_os) only, every other parameter
/// held fixed at its value in `init`; the Jacobian is analytic. Starts from
/// h = phi_os = 0, stops at step norm < 1e-12 or 200 iterations.
struct RefineResult {
  GeneralOscSignal params;
  int iterations = 0;
  bool converged = false;
};
RefineResult nonlinear_refine(const SampledWaveform& w, const GeneralOscSignal& init);

/// Partial derivatives of the model value with respect to (h, phi_os) at
/// time t — the two Jacobian columns used by nonlinear_refine.
std::pair<double, double> angle_mod_gradient(const GeneralOscSignal& p, double t);

/// Steps 1-6 composed, plus a final block refinement that alternates the
/// linear coefficient solve with a small nonlinear solve over
/// (f1, f_os, h, phi_os); noise-free records in the model class are
/// recovered to machine accuracy.
EstimationResult estimate(const SampledWaveform& w, double f_nominal,
                          const EstimateOptions& opts = {});

}  // namespace pmulab

#endif
