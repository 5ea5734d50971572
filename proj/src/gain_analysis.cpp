#include "pmulab/gain_analysis.hpp"

#include <cmath>

namespace pmulab {

namespace {

void check_gain_args(double f1, int n_cycles) {
  if (!(f1 > 0.0)) throw InputError("f1 must be positive");
  if (n_cycles < 1) throw InputError("n_cycles must be >= 1");
}

}  // namespace

namespace {

// sin(pi*x) with argument reduction so integer x gives an exact zero
double sin_pi(double x) {
  const double r = std::round(x);
  const double s = std::sin(kPi * (x - r));
  return static_cast<long long>(r) % 2 == 0 ? s : -s;
}

}  // namespace

double f_gain(double f1, double f_os, int n_cycles) {
  check_gain_args(f1, n_cycles);
  if (f_os < 0.0) throw InputError("f_os must be non-negative");
  if (f_os == 0.0) return 1.0;
  if (std::abs(f_os - 2.0 * f1) < 1e-12 * f1) return 0.5;  // removable singularity
  const double N = static_cast<double>(n_cycles);
  return 2.0 / (kPi * N) * sin_pi(f_os * N / f1) *
         (2.0 * f1 * f1 * f1 - f_os * f_os * f1) / (f_os * (4.0 * f1 * f1 - f_os * f_os));
}

double f_gain_exact(double f1, double f_os, int n_cycles) {
  check_gain_args(f1, n_cycles);
  if (f_os < 0.0) throw InputError("f_os must be non-negative");
  if (f_os == 0.0) return 1.0;
  const double x = f_os * static_cast<double>(n_cycles) / f1;
  return sin_pi(x) / (kPi * x);
}

GainProfile gain_profile(double f1, int n_cycles, double f_max, double step) {
  check_gain_args(f1, n_cycles);
  if (!(step > 0.0) || !(f_max > 0.0)) throw InputError("f_max and step must be positive");
  GainProfile g;
  g.f1 = f1;
  g.n_cycles = n_cycles;
  for (double f = 0.0; f <= f_max + 0.5 * step; f += step)
    g.points.emplace_back(f, f_gain(f1, f, n_cycles));
  return g;
}

double predicted_amplitude(const AmplitudeModSignal& p, int n_cycles, double tau) {
  p.validate();
  const double N = static_cast<double>(n_cycles);
  const double gain = f_gain(p.f1, p.f_os, n_cycles);
  return p.A * (1.0 + p.m * gain * std::cos(kTwoPi * p.f_os * tau + kPi * p.f_os * N / p.f1 + p.phi2));
}

double predicted_amplitude_exact(const AmplitudeModSignal& p, int n_cycles, double tau) {
  p.validate();
  if (p.f_os == 0.0 || p.m == 0.0) return p.A;
  const double N = static_cast<double>(n_cycles);
  const double f1 = p.f1, fos = p.f_os;
  const double pref = std::sin(kPi * fos * N / f1) / (fos * kPi * (4.0 * f1 * f1 - fos * fos));
  const double arg = p.phi2 + kTwoPi * fos * tau + kPi * fos * N / f1;
  const double C =
      pref * (fos * f1 * std::sin(arg) * std::sin(2.0 * kTwoPi * f1 * tau + p.phi1) +
              fos * fos * std::cos(kTwoPi * f1 * tau + p.phi1) * std::cos(kTwoPi * f1 * tau) *
                  std::cos(arg) -
              2.0 * f1 * f1 * std::cos(p.phi1) * std::cos(arg));
  const double D =
      pref * (fos * f1 * std::sin(arg) * std::cos(2.0 * kTwoPi * f1 * tau + p.phi1) -
              fos * fos * std::cos(kTwoPi * f1 * tau + p.phi1) * std::sin(kTwoPi * f1 * tau) *
                  std::cos(arg) -
              2.0 * f1 * f1 * std::sin(p.phi1) * std::cos(arg));
  const double scale = 2.0 * p.A * f1 * p.m / N;
  const double xr = p.A * std::cos(p.phi1) - scale * C;
  const double xi = p.A * std::sin(p.phi1) - scale * D;
  return std::hypot(xr, xi);
}

std::vector<double> flip_frequencies(double f1, int n_cycles, double f_max) {
  check_gain_args(f1, n_cycles);
  const double N = static_cast<double>(n_cycles);
  if (!(f_max > f1 / N)) throw InputError("f_max must exceed f1/N");
  std::vector<double> out;
  for (int k = 1;; ++k) {
    const double f = static_cast<double>(k) * f1 / N;
    if (f > f_max) break;
    if (k == 2 * n_cycles) continue;  // zero cancelled by the rational factor at f_os = 2 f1
    out.push_back(f);
  }
  return out;
}

ApplicabilityTable applicability_table(double f1, std::span<const int> n_list,
                                       std::span<const double> f_os_list) {
  ApplicabilityTable t;
  t.n_cycles.assign(n_list.begin(), n_list.end());
  t.f_os.assign(f_os_list.begin(), f_os_list.end());
  t.gain_pct.resize(f_os_list.size());
  for (std::size_t r = 0; r < f_os_list.size(); ++r) {
    t.gain_pct[r].resize(n_list.size());
    for (std::size_t c = 0; c < n_list.size(); ++c)
      t.gain_pct[r][c] = 100.0 * f_gain(f1, f_os_list[r], n_list[c]);
  }
  return t;
}

double timestamp_phase_error(double f_os, int n_cycles, double f1,
                             double stamp_offset_from_center) {
  check_gain_args(f1, n_cycles);
  return kTwoPi * f_os * stamp_offset_from_center;
}

double end_of_window_offset(int n_cycles, double f1) {
  check_gain_args(f1, n_cycles);
  return static_cast<double>(n_cycles) / (2.0 * f1);
}

int max_window_cycles(double f1, double f_os, double tolerance, int n_max) {
  check_gain_args(f1, 1);
  int best = 0;
  for (int n = 1; n <= n_max; ++n)
    if (std::abs(1.0 - f_gain(f1, f_os, n)) <= tolerance) best = n;
  return best;
}

}  // namespace pmulab
