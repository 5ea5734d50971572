#include "pmulab/signal_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace pmulab {

namespace {

void check_sampling(double fs, double duration, double f_max) {
  if (!(fs > 0.0)) throw InputError("sample rate must be positive");
  if (!(duration > 0.0)) throw InputError("duration must be positive");
  if (fs <= 2.0 * f_max) throw InputError("sample rate below Nyquist of the highest component");
}

std::size_t sample_count(double fs, double duration) {
  return static_cast<std::size_t>(std::llround(fs * duration));
}

}  // namespace

void AmplitudeModSignal::validate() const {
  if (!(f1 > 0.0)) throw InputError("f1 must be positive");
  if (!(A > 0.0)) throw InputError("A must be positive");
  if (m < 0.0) throw InputError("m must be non-negative");
  if (f_os < 0.0) throw InputError("f_os must be non-negative");
}

double AmplitudeModSignal::envelope(double t) const {
  return A * (1.0 + m * std::cos(kTwoPi * f_os * t + phi2));
}

double AmplitudeModSignal::value(double t) const {
  return envelope(t) * std::cos(kTwoPi * f1 * t + phi1);
}

void GeneralOscSignal::validate() const {
  if (!(f1 > 0.0)) throw InputError("f1 must be positive");
  if (!(a > 0.0)) throw InputError("a must be positive");
  if (b1 < 0.0 || b2 < 0.0) throw InputError("b1/b2 must be non-negative");
  if (h < 0.0) throw InputError("h must be non-negative");
  const bool modulated = b1 > 0.0 || b2 > 0.0 || h > 0.0;
  if (modulated && !(f_os > 0.0 && f_os < f1))
    throw InputError("f_os must satisfy 0 < f_os < f1");
  if (!modulated && (f_os < 0.0 || f_os >= f1))
    throw InputError("f_os must lie in [0, f1)");
}

double GeneralOscSignal::value(double t) const {
  const double ang = h * std::cos(kTwoPi * f_os * t + phi_os);
  return a * std::cos(kTwoPi * f1 * t + phi1 + ang) +
         b1 * std::cos(kTwoPi * (f1 - f_os) * t + phi_sub + ang) +
         b2 * std::cos(kTwoPi * (f1 + f_os) * t + phi_sup + ang);
}

void ThreeComponentSignal::validate() const { with_angle_mod(0.0, 0.0).validate(); }

double ThreeComponentSignal::value(double t) const { return with_angle_mod(0.0, 0.0).value(t); }

GeneralOscSignal ThreeComponentSignal::with_angle_mod(double h, double phi_os) const {
  GeneralOscSignal g;
  g.a = a;
  g.f1 = f1;
  g.phi1 = phi1;
  g.f_os = f_os;
  g.phi_os = phi_os;
  g.h = h;
  g.b1 = b1;
  g.phi_sub = phi_sub;
  g.b2 = b2;
  g.phi_sup = phi_sup;
  return g;
}

double RectCoefficients::value(double t) const {
  const double w1 = kTwoPi * f1 * t;
  const double wm = kTwoPi * (f1 - f_os) * t;
  const double wp = kTwoPi * (f1 + f_os) * t;
  return A1 * std::cos(w1) + B1 * std::sin(w1) + A2 * std::cos(wm) + B2 * std::sin(wm) +
         A3 * std::cos(wp) + B3 * std::sin(wp);
}

SampledWaveform synthesize_am(const AmplitudeModSignal& p, double fs, double duration, double t0) {
  p.validate();
  check_sampling(fs, duration, p.f1 + p.f_os);
  SampledWaveform w;
  w.fs = fs;
  w.t0 = t0;
  w.samples.resize(sample_count(fs, duration));
  const auto n = static_cast<long>(w.samples.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) w.samples[k] = p.value(t0 + static_cast<double>(k) / fs);
  w.validate();
  return w;
}

SampledWaveform synthesize_general(const GeneralOscSignal& p, double fs, double duration,
                                   double t0) {
  p.validate();
  check_sampling(fs, duration, p.f1 + p.f_os);
  SampledWaveform w;
  w.fs = fs;
  w.t0 = t0;
  w.samples.resize(sample_count(fs, duration));
  const auto n = static_cast<long>(w.samples.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) w.samples[k] = p.value(t0 + static_cast<double>(k) / fs);
  w.validate();
  return w;
}

namespace {

// amp*cos(w t + phi) = A cos(w t) + B sin(w t) with A = amp cos(phi), B = -amp sin(phi)
void to_polar(double A, double B, double& amp, double& phi) {
  amp = std::hypot(A, B);
  phi = (amp == 0.0) ? 0.0 : std::atan2(-B, A);
}

}  // namespace

ThreeComponentSignal rect_to_polar(const RectCoefficients& r) {
  ThreeComponentSignal p;
  p.f1 = r.f1;
  p.f_os = r.f_os;
  to_polar(r.A1, r.B1, p.a, p.phi1);
  to_polar(r.A2, r.B2, p.b1, p.phi_sub);
  to_polar(r.A3, r.B3, p.b2, p.phi_sup);
  return p;
}

RectCoefficients polar_to_rect(const ThreeComponentSignal& p) {
  RectCoefficients r;
  r.f1 = p.f1;
  r.f_os = p.f_os;
  r.A1 = p.a * std::cos(p.phi1);
  r.B1 = -p.a * std::sin(p.phi1);
  r.A2 = p.b1 * std::cos(p.phi_sub);
  r.B2 = -p.b1 * std::sin(p.phi_sub);
  r.A3 = p.b2 * std::cos(p.phi_sup);
  r.B3 = -p.b2 * std::sin(p.phi_sup);
  return r;
}

namespace {

// Gauss-Newton fit of the single-envelope model
//   g(t; a, b, phi1, phi2) = [a + b cos(2 pi f_os t + phi2)] cos(2 pi f1 t + phi1)
// to the sampled target. Returns the fit E_PoW in percent (normalized by the
// true carrier amplitude), or nullopt when the iteration diverges.
std::optional<double> fit_envelope_model(const ThreeComponentSignal& p, double fs,
                                         double duration) {
  const auto w = synthesize_general(p.with_angle_mod(0.0, 0.0), fs, duration, 0.0);
  const auto n = static_cast<Eigen::Index>(w.samples.size());
  Eigen::VectorXd y(n), t(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    y[k] = w.samples[k];
    t[k] = static_cast<double>(k) / fs;
  }

  Eigen::Vector4d th;  // a, b, phi1, phi2
  th << p.a, p.b1 + p.b2, p.phi1, wrap_phase(p.phi_sup - p.phi1);

  const int max_iter = 100;
  const double step_tol = 1e-12;
  Eigen::VectorXd r(n);
  Eigen::MatrixXd J(n, 4);
  double cost = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double c1 = std::cos(kTwoPi * p.f1 * t[k] + th[2]);
      const double s1 = std::sin(kTwoPi * p.f1 * t[k] + th[2]);
      const double c2 = std::cos(kTwoPi * p.f_os * t[k] + th[3]);
      const double s2 = std::sin(kTwoPi * p.f_os * t[k] + th[3]);
      const double env = th[0] + th[1] * c2;
      r[k] = y[k] - env * c1;
      J(k, 0) = c1;
      J(k, 1) = c2 * c1;
      J(k, 2) = -env * s1;
      J(k, 3) = -th[1] * s2 * c1;
    }
    cost = r.squaredNorm();
    Eigen::Vector4d step = J.colPivHouseholderQr().solve(r);
    if (!step.allFinite()) return std::nullopt;
    // plain Gauss-Newton with step halving as a safeguard
    double scale = 1.0;
    Eigen::Vector4d trial = th + step;
    for (int half = 0; half < 30; ++half) {
      double c_trial = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double env = trial[0] + trial[1] * std::cos(kTwoPi * p.f_os * t[k] + trial[3]);
        const double d = y[k] - env * std::cos(kTwoPi * p.f1 * t[k] + trial[2]);
        c_trial += d * d;
      }
      if (c_trial <= cost || scale < 1e-12) break;
      scale *= 0.5;
      trial = th + scale * step;
    }
    th = trial;
    if ((scale * step).norm() < step_tol) break;
  }
  if (!th.allFinite()) return std::nullopt;

  // final residual with converged parameters
  double e_ls = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double env = th[0] + th[1] * std::cos(kTwoPi * p.f_os * t[k] + th[3]);
    const double d = y[k] - env * std::cos(kTwoPi * p.f1 * t[k] + th[2]);
    e_ls += d * d;
  }
  return 100.0 * std::sqrt(e_ls / static_cast<double>(n)) / p.a;
}

}  // namespace

RepresentabilityReport check_representability(const ThreeComponentSignal& p, double fs,
                                              double duration) {
  p.validate();
  RepresentabilityReport rep;
  rep.b1 = p.b1;
  rep.b2 = p.b2;
  const double bmax = std::max(p.b1, p.b2);
  rep.amplitude_asymmetry = bmax > 0.0 ? std::abs(p.b1 - p.b2) / bmax : 0.0;
  rep.phase_residual = wrap_phase(p.phi_sub + p.phi_sup - 2.0 * p.phi1);
  rep.equivalent_b = 2.0 * p.b1;
  rep.equivalent_phi2 = wrap_phase(p.phi_sup - p.phi1);
  rep.representable = rep.amplitude_asymmetry <= 1e-6 && std::abs(rep.phase_residual) <= 1e-6;
  rep.fit_error_pct = fit_envelope_model(p, fs, duration);
  return rep;
}

ClarkeSeries clarke_magnitude(const SampledWaveform& va, const SampledWaveform& vb,
                              const SampledWaveform& vc) {
  va.validate();
  vb.validate();
  vc.validate();
  if (va.samples.size() != vb.samples.size() || va.samples.size() != vc.samples.size())
    throw InputError("phase records must have equal length");
  if (va.fs != vb.fs || va.fs != vc.fs || va.t0 != vb.t0 || va.t0 != vc.t0)
    throw InputError("phase records must share sample rate and start time");

  ClarkeSeries out;
  out.fs = va.fs;
  out.t0 = va.t0;
  out.magnitude.resize(va.samples.size());
  out.phase.resize(va.samples.size());
  const auto n = static_cast<long>(va.samples.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) {
    const double alpha = (2.0 * va.samples[k] - vb.samples[k] - vc.samples[k]) / 3.0;
    const double beta = (vb.samples[k] - vc.samples[k]) / std::sqrt(3.0);
    out.magnitude[k] = std::hypot(alpha, beta);
    out.phase[k] = out.magnitude[k] == 0.0 ? 0.0 : std::atan2(-beta, alpha);
  }
  return out;
}

}  // namespace pmulab
