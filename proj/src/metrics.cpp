#include "pmulab/metrics.hpp"

#include <cmath>

namespace pmulab {

double e_ls(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw InputError("series length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double d = y[k] - y_hat[k];
    acc += d * d;
  }
  return acc;
}

double e_pow(std::span<const double> y, std::span<const double> y_hat, double a_ref, double ts) {
  if (y.size() < 2) throw InputError("series needs at least 2 samples");
  if (!(a_ref > 0.0)) throw InputError("normalizing amplitude must be positive");
  if (!(ts > 0.0)) throw InputError("sample interval must be positive");
  const double span = static_cast<double>(y.size()) * ts;  // T2 - T1 = M*ts
  return 100.0 * std::sqrt(e_ls(y, y_hat) * ts / span) / a_ref;
}

double e_pow_from_ls(double e_ls_value, std::size_t m, double a_ref) {
  if (m < 1) throw InputError("sample count must be at least 1");
  if (!(a_ref > 0.0)) throw InputError("normalizing amplitude must be positive");
  if (e_ls_value < 0.0) throw InputError("sum of squares cannot be negative");
  return 100.0 * std::sqrt(e_ls_value / static_cast<double>(m)) / a_ref;
}

ErrorReport compare(std::span<const double> y, std::span<const double> y_hat, double a_ref,
                    double ts, double t1) {
  ErrorReport r;
  r.e_ls = e_ls(y, y_hat);
  r.m_samples = y.size();
  r.ts = ts;
  r.t1 = t1;
  r.t2 = t1 + static_cast<double>(y.size()) * ts;
  r.a_ref = a_ref;
  r.e_pow_pct = e_pow_from_ls(r.e_ls, r.m_samples, a_ref);
  return r;
}

SampledWaveform reconstruct(const GeneralOscSignal& p, double fs, double duration, double t0) {
  return synthesize_general(p, fs, duration, t0);
}

}  // namespace pmulab
