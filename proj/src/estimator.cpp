#include "pmulab/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pmulab/kernels.hpp"
#include "pmulab/metrics.hpp"

namespace pmulab {

namespace {

constexpr int kStepFundamental = 1;
constexpr int kStepAmplitudeCurve = 2;
constexpr int kStepOscFrequency = 3;
constexpr int kStepLinearFit = 4;

Eigen::VectorXd record_vector(const SampledWaveform& w) {
  return Eigen::Map<const Eigen::VectorXd>(w.samples.data(),
                                           static_cast<Eigen::Index>(w.samples.size()));
}

// six-column cos/sin design at {f1, f1-f_os, f1+f_os}; theta_offset adds the
// shared angle modulation h*cos(2*pi*f_os*t + phi_os) to every band
Eigen::MatrixXd design_matrix(const SampledWaveform& w, double f1, double f_os, double h,
                              double phi_os) {
  const auto n = static_cast<Eigen::Index>(w.samples.size());
  Eigen::MatrixXd phi(n, 6);
  const double w1 = kTwoPi * f1;
  const double wm = kTwoPi * (f1 - f_os);
  const double wp = kTwoPi * (f1 + f_os);
  const double wo = kTwoPi * f_os;
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = w.t0 + static_cast<double>(k) / w.fs;
    const double ang = h == 0.0 ? 0.0 : h * std::cos(wo * t + phi_os);
    phi(k, 0) = std::cos(w1 * t + ang);
    phi(k, 1) = std::sin(w1 * t + ang);
    phi(k, 2) = std::cos(wm * t + ang);
    phi(k, 3) = std::sin(wm * t + ang);
    phi(k, 4) = std::cos(wp * t + ang);
    phi(k, 5) = std::sin(wp * t + ang);
  }
  return phi;
}

struct LinearSolve {
  Eigen::Matrix<double, 6, 1> coef;
  Eigen::VectorXd residual;
  double cost = 0.0;
};

LinearSolve solve_linear(const SampledWaveform& w, const Eigen::VectorXd& y, double f1,
                         double f_os, double h, double phi_os) {
  const Eigen::MatrixXd phi = design_matrix(w, f1, f_os, h, phi_os);
  LinearSolve out;
  out.coef = phi.colPivHouseholderQr().solve(y);
  out.residual = y - phi * out.coef;
  out.cost = out.residual.squaredNorm();
  return out;
}

RectCoefficients to_rect(const Eigen::Matrix<double, 6, 1>& c, double f1, double f_os) {
  RectCoefficients r;
  r.f1 = f1;
  r.f_os = f_os;
  r.A1 = c[0];
  r.B1 = c[1];
  r.A2 = c[2];
  r.B2 = c[3];
  r.A3 = c[4];
  r.B3 = c[5];
  return r;
}

}  // namespace

double estimate_fundamental(const SampledWaveform& w, double f_nominal) {
  w.validate();
  if (!(f_nominal > 0.0)) throw InputError("nominal frequency must be positive");
  if (w.duration() < 10.0 / f_nominal)
    throw InputError("record shorter than 10 nominal cycles");

  double f = f_nominal;
  for (int pass = 0; pass < 2; ++pass) {
    const double span = 1.0 / f;
    const double first = w.t0 + w.ts();
    const double last = w.end_time() - span - w.ts();
    std::vector<double> stamps;
    std::vector<double> phases;
    for (double tau = first; tau <= last + 1e-12; tau += span) {
      const auto x = kernels::window_phasor(w, tau, 1, f);
      stamps.push_back(tau + span / 2.0);
      phases.push_back(std::atan2(x.imag(), x.real()));
    }
    if (phases.size() < 3) throw InputError("record shorter than 10 nominal cycles");

    // unwrap, then least-squares slope of phase vs time
    for (std::size_t i = 1; i < phases.size(); ++i)
      phases[i] = phases[i - 1] + wrap_phase(phases[i] - phases[i - 1]);
    double t_mean = 0.0, p_mean = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
      t_mean += stamps[i];
      p_mean += phases[i];
    }
    t_mean /= static_cast<double>(stamps.size());
    p_mean /= static_cast<double>(stamps.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
      num += (stamps[i] - t_mean) * (phases[i] - p_mean);
      den += (stamps[i] - t_mean) * (stamps[i] - t_mean);
    }
    f += num / den / kTwoPi;
  }
  if (std::abs(f - f_nominal) > 5.0)
    throw NumericalError("fundamental estimate outside the +/-5 Hz band");
  return f;
}

PhasorSeries amplitude_curve(const SampledWaveform& w, double f1, int hop_samples) {
  w.validate();
  if (hop_samples < 1) throw InputError("hop must be at least one sample");
  if (!(f1 > 0.0)) throw InputError("f1 must be positive");
  const double span = 1.0 / f1;
  if (w.duration() < span + static_cast<double>(hop_samples) / w.fs)
    throw InputError("record too short for a one-cycle window");

  std::vector<double> starts;
  const double last = w.end_time() - span;
  for (double tau = w.t0; tau <= last + 1e-12;
       tau += static_cast<double>(hop_samples) / w.fs)
    starts.push_back(tau);

  const auto phasors = kernels::sliding_dft(w, starts, 1, f1);
  PhasorSeries s;
  s.rate = w.fs / static_cast<double>(hop_samples);
  s.points.resize(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i)
    s.points[i] = PhasorPoint{starts[i] + span / 2.0, phasors[i].real(), phasors[i].imag()};
  return s;
}

double estimate_osc_frequency(const PhasorSeries& curve) {
  if (curve.size() < 8) throw InputError("amplitude curve needs at least 8 points");
  const auto amps = curve.amplitudes();
  const double duration = static_cast<double>(amps.size()) / curve.rate;

  double level = 0.0;
  for (double a : amps) level = std::max(level, std::abs(a));

  const auto modes = matrix_pencil(amps, curve.rate);
  Mode dom;
  try {
    dom = dominant_mode(modes, 0.5 / duration, curve.rate / 2.0);
  } catch (const NumericalError&) {
    throw NoOscillationError(kStepOscFrequency);
  }
  if (dom.amplitude < 1e-7 * level) throw NoOscillationError(kStepOscFrequency);
  return dom.frequency;
}

RectCoefficients linear_ls_fit(const SampledWaveform& w, double f1, double f_os) {
  w.validate();
  if (w.samples.size() < 6) throw InputError("need at least 6 samples");
  if (!(f_os > 0.0) || std::abs(f_os - f1) < 1e-9 * f1)
    throw InputError("degenerate oscillation frequency (basis collinear)");

  const Eigen::VectorXd y = record_vector(w);
  const Eigen::MatrixXd phi = design_matrix(w, f1, f_os, 0.0, 0.0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
  qr.setThreshold(1e-10);
  if (qr.rank() < 6) throw NumericalError("collinear least-squares basis");
  const Eigen::Matrix<double, 6, 1> coef = qr.solve(y);
  return to_rect(coef, f1, f_os);
}

namespace {

// model value and its partial derivatives w.r.t. h and phi_os
void model_eval(const GeneralOscSignal& p, double t, double& value, double& dh, double& dphi) {
  const double omega_os = kTwoPi * p.f_os;
  const double cos_o = std::cos(omega_os * t + p.phi_os);
  const double sin_o = std::sin(omega_os * t + p.phi_os);
  const double ang = p.h * cos_o;
  const double th1 = kTwoPi * p.f1 * t + p.phi1 + ang;
  const double thm = kTwoPi * (p.f1 - p.f_os) * t + p.phi_sub + ang;
  const double thp = kTwoPi * (p.f1 + p.f_os) * t + p.phi_sup + ang;
  value = p.a * std::cos(th1) + p.b1 * std::cos(thm) + p.b2 * std::cos(thp);
  const double dsum = p.a * std::sin(th1) + p.b1 * std::sin(thm) + p.b2 * std::sin(thp);
  dh = -dsum * cos_o;
  dphi = dsum * p.h * sin_o;
}

void normalize_angle_mod(GeneralOscSignal& p) {
  if (p.h < 0.0) {
    p.h = -p.h;
    p.phi_os += kPi;
  }
  p.phi_os = wrap_phase(p.phi_os);
}

}  // namespace

std::pair<double, double> angle_mod_gradient(const GeneralOscSignal& p, double t) {
  double v, dh, dphi;
  model_eval(p, t, v, dh, dphi);
  return {dh, dphi};
}

RefineResult nonlinear_refine(const SampledWaveform& w, const GeneralOscSignal& init) {
  w.validate();
  const auto n = static_cast<Eigen::Index>(w.samples.size());
  const Eigen::VectorXd y = record_vector(w);

  GeneralOscSignal p = init;
  p.h = 0.0;
  p.phi_os = 0.0;

  auto cost_of = [&](const GeneralOscSignal& q) {
    double c = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      double v, dh, dp;
      model_eval(q, w.t0 + static_cast<double>(k) / w.fs, v, dh, dp);
      const double r = y[k] - v;
      c += r * r;
    }
    return c;
  };

  double cost = cost_of(p);
  double lambda = 1e-3;
  RefineResult out;
  const int max_iter = 200;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      double v, dh, dp;
      model_eval(p, w.t0 + static_cast<double>(k) / w.fs, v, dh, dp);
      const double r = y[k] - v;
      g0 += dh * r;
      g1 += dp * r;
      h00 += dh * dh;
      h01 += dh * dp;
      h11 += dp * dp;
    }
    // convergence test on the (lightly regularized) undamped Gauss-Newton
    // step; at h = 0 the phi_os row vanishes and the regularization keeps
    // the solve well defined
    const double reg = 1e-14 * (h00 + h11) + 1e-300;
    const double r00 = h00 + reg, r11 = h11 + reg;
    const double det0 = r00 * r11 - h01 * h01;
    if (det0 > 0.0 &&
        std::hypot((r11 * g0 - h01 * g1) / det0, (r00 * g1 - h01 * g0) / det0) < 1e-12) {
      out.converged = true;
      ++out.iterations;
      break;
    }

    const double d0 = h00 + lambda * h00 + 1e-300;
    const double d1 = h11 + lambda * h11 + 1e-300;
    const double det = d0 * d1 - h01 * h01;
    if (det == 0.0) break;
    const double step_h = (d1 * g0 - h01 * g1) / det;
    const double step_p = (d0 * g1 - h01 * g0) / det;
    GeneralOscSignal trial = p;
    trial.h += step_h;
    trial.phi_os += step_p;
    const double trial_cost = cost_of(trial);
    if (trial_cost < cost) {
      p = trial;
      cost = trial_cost;
      lambda = std::max(lambda * 0.3, 1e-12);
    } else {
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
  }
  normalize_angle_mod(p);
  out.params = p;
  return out;
}

namespace {

struct PolishResult {
  double f1 = 0.0;
  double f_os = 0.0;
  double h = 0.0;
  double phi_os = 0.0;
  Eigen::Matrix<double, 6, 1> coef;
  double cost = 0.0;
  int iterations = 0;
};

// Variable-projection Levenberg-Marquardt: for each candidate
// (f1, f_os, h, phi_os) the six linear coefficients are re-solved, so the
// explicit nonlinear block stays small. Jacobian by central differences of
// the projected residual.
PolishResult polish_general(const SampledWaveform& w, const Eigen::VectorXd& y, double f1,
                            double f_os, double h, double phi_os) {
  Eigen::Vector4d th{f1, f_os, h, phi_os};
  auto evaluate = [&](const Eigen::Vector4d& v) {
    return solve_linear(w, y, v[0], v[1], v[2], v[3]);
  };
  auto valid = [&](const Eigen::Vector4d& v) { return v[0] > 0.0 && v[1] > 0.0 && v[1] < v[0]; };

  LinearSolve cur = evaluate(th);
  double lambda = 1e-6;
  PolishResult out;
  const auto n = y.size();
  const int max_iter = 100;
  int it = 0;
  for (; it < max_iter; ++it) {
    Eigen::MatrixXd jac(n, 4);
    for (int i = 0; i < 4; ++i) {
      const double delta = 1e-7 * std::max(1.0, std::abs(th[i]));
      Eigen::Vector4d up = th, dn = th;
      up[i] += delta;
      dn[i] -= delta;
      if (!valid(up) || !valid(dn)) {
        jac.col(i).setZero();
        continue;
      }
      jac.col(i) = (evaluate(up).residual - evaluate(dn).residual) / (2.0 * delta);
    }
    const Eigen::Vector4d g = jac.transpose() * cur.residual;
    Eigen::Matrix4d hess = jac.transpose() * jac;
    bool accepted = false;
    for (int tries = 0; tries < 20; ++tries) {
      Eigen::Matrix4d damped = hess;
      for (int i = 0; i < 4; ++i) damped(i, i) += lambda * hess(i, i) + 1e-300;
      const Eigen::Vector4d step = damped.ldlt().solve(-g);
      const Eigen::Vector4d trial = th + step;
      if (valid(trial)) {
        const LinearSolve ls = evaluate(trial);
        if (ls.cost < cur.cost) {
          const double rel_step =
              (step.cwiseQuotient(th.cwiseAbs().cwiseMax(1e-3))).cwiseAbs().maxCoeff();
          th = trial;
          cur = ls;
          lambda = std::max(lambda * 0.3, 1e-14);
          accepted = true;
          if (rel_step < 1e-13) it = max_iter;  // converged
          break;
        }
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (!accepted) break;
  }
  out.f1 = th[0];
  out.f_os = th[1];
  out.h = th[2];
  out.phi_os = th[3];
  out.coef = cur.coef;
  out.cost = cur.cost;
  out.iterations = it;
  return out;
}

// one-parameter frequency polish for records with no detected oscillation
double polish_tone(const SampledWaveform& w, const Eigen::VectorXd& y, double f1,
                   Eigen::Vector2d& coef_out, double& cost_out) {
  const auto n = static_cast<Eigen::Index>(w.samples.size());
  auto evaluate = [&](double f) {
    Eigen::MatrixXd phi(n, 2);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t = w.t0 + static_cast<double>(k) / w.fs;
      phi(k, 0) = std::cos(kTwoPi * f * t);
      phi(k, 1) = std::sin(kTwoPi * f * t);
    }
    Eigen::Vector2d c = phi.colPivHouseholderQr().solve(y);
    const double cost = (y - phi * c).squaredNorm();
    return std::pair{c, cost};
  };
  double f = f1;
  auto [coef, cost] = evaluate(f);
  double lambda = 1e-6;
  for (int it = 0; it < 60; ++it) {
    const double delta = 1e-7 * std::max(1.0, std::abs(f));
    const double cp = evaluate(f + delta).second;
    const double cm = evaluate(f - delta).second;
    const double grad = (cp - cm) / (2.0 * delta);
    const double curv = std::max((cp - 2.0 * cost + cm) / (delta * delta), 1e-300);
    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      const double step = -grad / (curv * (1.0 + lambda));
      auto [c_trial, cost_trial] = evaluate(f + step);
      if (cost_trial < cost && f + step > 0.0) {
        f += step;
        coef = c_trial;
        cost = cost_trial;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        if (std::abs(step) < 1e-12 * std::max(1.0, f)) it = 60;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
    if (!accepted) break;
  }
  coef_out = coef;
  cost_out = cost;
  return f;
}

// joint Levenberg-Marquardt over all ten parameters (optional final pass)
GeneralOscSignal refine_all_params(const SampledWaveform& w, const Eigen::VectorXd& y,
                                   const GeneralOscSignal& start) {
  auto pack = [](const GeneralOscSignal& p) {
    Eigen::VectorXd v(10);
    v << p.a, p.f1, p.phi1, p.f_os, p.phi_os, p.h, p.b1, p.phi_sub, p.b2, p.phi_sup;
    return v;
  };
  auto unpack = [](const Eigen::VectorXd& v) {
    GeneralOscSignal p;
    p.a = v[0];
    p.f1 = v[1];
    p.phi1 = v[2];
    p.f_os = v[3];
    p.phi_os = v[4];
    p.h = v[5];
    p.b1 = v[6];
    p.phi_sub = v[7];
    p.b2 = v[8];
    p.phi_sup = v[9];
    return p;
  };
  const auto n = static_cast<Eigen::Index>(w.samples.size());
  auto residual = [&](const Eigen::VectorXd& v) {
    const GeneralOscSignal p = unpack(v);
    Eigen::VectorXd r(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      double val, dh, dp;
      model_eval(p, w.t0 + static_cast<double>(k) / w.fs, val, dh, dp);
      r[k] = y[k] - val;
    }
    return r;
  };

  Eigen::VectorXd th = pack(start);
  Eigen::VectorXd r = residual(th);
  double cost = r.squaredNorm();
  double lambda = 1e-6;
  for (int it = 0; it < 80; ++it) {
    Eigen::MatrixXd jac(n, 10);
    for (int i = 0; i < 10; ++i) {
      const double delta = 1e-7 * std::max(0.01, std::abs(th[i]));
      Eigen::VectorXd up = th, dn = th;
      up[i] += delta;
      dn[i] -= delta;
      jac.col(i) = (residual(up) - residual(dn)) / (2.0 * delta);
    }
    const Eigen::VectorXd g = jac.transpose() * r;
    Eigen::MatrixXd hess = jac.transpose() * jac;
    bool accepted = false;
    for (int tries = 0; tries < 15; ++tries) {
      Eigen::MatrixXd damped = hess;
      for (int i = 0; i < 10; ++i) damped(i, i) += lambda * hess(i, i) + 1e-300;
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      const Eigen::VectorXd trial = th + step;
      const Eigen::VectorXd r_trial = residual(trial);
      const double cost_trial = r_trial.squaredNorm();
      if (cost_trial < cost) {
        th = trial;
        r = r_trial;
        cost = cost_trial;
        lambda = std::max(lambda * 0.3, 1e-14);
        accepted = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (!accepted) break;
  }
  GeneralOscSignal out = unpack(th);
  normalize_angle_mod(out);
  out.phi1 = wrap_phase(out.phi1);
  out.phi_sub = wrap_phase(out.phi_sub);
  out.phi_sup = wrap_phase(out.phi_sup);
  return out;
}

}  // namespace

EstimationResult estimate(const SampledWaveform& w, double f_nominal,
                          const EstimateOptions& opts) {
  w.validate();
  if (w.duration() < 10.0 / f_nominal)
    throw EstimationError(kStepFundamental, "record too short (need 10 nominal cycles)");

  EstimationResult res;
  double f1 = 0.0;
  try {
    f1 = estimate_fundamental(w, f_nominal);
  } catch (const NumericalError& e) {
    throw EstimationError(kStepFundamental, e.what());
  }
  const Eigen::VectorXd y = record_vector(w);

  // steps 2-3: amplitude curve over a window that is grown until it covers
  // at least 1.5 oscillation periods (at most 3 iterations)
  const int hop = std::max(1, static_cast<int>(std::llround(w.fs / 240.0)));
  bool oscillating = true;
  double f_os = 0.0;
  double win = std::min(w.duration(), std::max(10.0 / f_nominal, 1.0));
  for (int it = 0; it < 3; ++it) {
    SampledWaveform part = w;
    const auto n_part = static_cast<std::size_t>(std::llround(win * w.fs));
    if (n_part < w.samples.size())
      part.samples.assign(w.samples.begin(), w.samples.begin() + static_cast<long>(n_part));
    try {
      f_os = estimate_osc_frequency(amplitude_curve(part, f1, hop));
    } catch (const NoOscillationError&) {
      oscillating = false;
      break;
    }
    const double needed = 1.5 / f_os + 1.0 / f1;
    if (win >= needed || win >= w.duration()) {
      if (w.duration() < needed)
        throw EstimationError(kStepAmplitudeCurve,
                              "record shorter than 1.5 periods of the detected oscillation");
      break;
    }
    win = std::min(w.duration(), needed);
  }

  if (!oscillating) {
    // pure-tone path: two-column fit plus a frequency polish
    Eigen::Vector2d coef;
    double cost = 0.0;
    f1 = polish_tone(w, y, f1, coef, cost);
    GeneralOscSignal p;
    p.f1 = f1;
    p.a = std::hypot(coef[0], coef[1]);
    p.phi1 = p.a == 0.0 ? 0.0 : std::atan2(-coef[1], coef[0]);
    p.f_os = 0.0;
    res.params = p;
    res.f1_est = f1;
    res.f_os_est = 0.0;
    res.rect.f1 = f1;
    res.rect.A1 = coef[0];
    res.rect.B1 = coef[1];
    res.e_ls = cost;
    res.e_pow_pct = e_pow_from_ls(cost, w.samples.size(), p.a);
    res.converged = true;
    return res;
  }

  // steps 4-5
  try {
    res.rect = linear_ls_fit(w, f1, f_os);
  } catch (const NumericalError& e) {
    throw EstimationError(kStepLinearFit, e.what());
  }
  const ThreeComponentSignal three = rect_to_polar(res.rect);

  // step 6
  const RefineResult ref = nonlinear_refine(w, three.with_angle_mod(0.0, 0.0));

  // final block refinement, then a strict two-parameter pass against the
  // refined linear parameters so the reported convergence flag reflects the
  // (h, phi_os) solve at the solution
  const PolishResult pol = polish_general(w, y, f1, f_os, ref.params.h, ref.params.phi_os);
  const ThreeComponentSignal final_three = rect_to_polar(to_rect(pol.coef, pol.f1, pol.f_os));
  const RefineResult confirm = nonlinear_refine(w, final_three.with_angle_mod(0.0, 0.0));
  res.iterations = ref.iterations + confirm.iterations;
  res.converged = confirm.converged;
  GeneralOscSignal params =
      final_three.with_angle_mod(confirm.params.h, confirm.params.phi_os);
  normalize_angle_mod(params);
  if (opts.refine_all) params = refine_all_params(w, y, params);

  res.params = params;
  res.f1_est = params.f1;
  res.f_os_est = params.f_os;

  const auto recon = reconstruct(params, w.fs, w.duration(), w.t0);
  res.e_ls = e_ls(w.samples, recon.samples);
  res.e_pow_pct = e_pow_from_ls(res.e_ls, w.samples.size(), params.a);
  return res;
}

}  // namespace pmulab
