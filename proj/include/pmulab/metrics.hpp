#ifndef PMULAB_METRICS_HPP
#define PMULAB_METRICS_HPP

#include <cstddef>
#include <span>

#include "pmulab/signal_model.hpp"
#include "pmulab/types.hpp"

namespace pmulab {

/// Reconstruction-error summary between a measured and an estimated series.
/// The discrete convention T2 - T1 = M * ts is used throughout so that
/// e_pow and e_pow_from_ls agree exactly.
struct ErrorReport {
  double e_ls = 0.0;      // sum of squared residuals [units^2]
  double e_pow_pct = 0.0; // normalized RMS error [%]
  std::size_t m_samples = 0;
  double t1 = 0.0;
  double t2 = 0.0;
  double ts = 0.0;
  double a_ref = 0.0;     // amplitude used for normalization
};

/// Sum of squared sample differences.
double e_ls(std::span<const double> y, std::span<const double> y_hat);

/// Normalized RMS error in percent: 100*sqrt(e_ls*ts/(T2-T1))/a_ref with
/// T2 - T1 = M*ts.
double e_pow(std::span<const double> y, std::span<const double> y_hat, double a_ref, double ts);

/// Same metric from a precomputed sum of squares: 100*sqrt(e_ls/m)/a_ref.
double e_pow_from_ls(double e_ls_value, std::size_t m, double a_ref);

ErrorReport compare(std::span<const double> y, std::span<const double> y_hat, double a_ref,
                    double ts, double t1 = 0.0);

/// Waveform synthesis from an estimated parameter set (closes the
/// estimate -> reconstruct -> compare loop).
SampledWaveform reconstruct(const GeneralOscSignal& p, double fs, double duration,
                            double t0 = 0.0);

}  // namespace pmulab

#endif
