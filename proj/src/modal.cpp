#include "pmulab/modal.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>

namespace pmulab {

namespace {

Mode dc_mode(double value) {
  Mode m;
  m.amplitude = std::abs(value);
  m.phase = value >= 0.0 ? 0.0 : kPi;
  return m;
}

}  // namespace

std::vector<Mode> matrix_pencil(std::span<const double> samples, double rate, double pencil_ratio,
                                double energy_tol) {
  if (samples.size() < 8) throw InputError("matrix pencil needs at least 8 samples");
  if (!(rate > 0.0)) throw InputError("rate must be positive");
  if (!(pencil_ratio > 0.0 && pencil_ratio < 1.0)) throw InputError("pencil ratio must be in (0,1)");
  if (!(energy_tol > 0.0)) throw InputError("energy tolerance must be positive");

  const auto m_total = static_cast<Eigen::Index>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(m_total);

  Eigen::VectorXd x(m_total);
  double scale = 0.0;
  for (Eigen::Index k = 0; k < m_total; ++k) {
    x[k] = samples[k] - mean;
    scale = std::max(scale, std::abs(x[k]));
  }
  // constant (or zero) series: pencil rank 0
  if (scale <= 1e-13 * std::abs(mean) || scale == 0.0) {
    std::vector<Mode> out;
    if (mean != 0.0) out.push_back(dc_mode(mean));
    return out;
  }

  Eigen::Index L = static_cast<Eigen::Index>(std::llround(pencil_ratio * static_cast<double>(m_total)));
  L = std::clamp<Eigen::Index>(L, 2, m_total - 3);

  Eigen::MatrixXd hankel(m_total - L, L + 1);
  for (Eigen::Index i = 0; i < m_total - L; ++i)
    for (Eigen::Index j = 0; j <= L; ++j) hankel(i, j) = x[i + j];

  Eigen::BDCSVD<Eigen::MatrixXd> svd(hankel, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::Index order = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > energy_tol * sv[0]) ++order;
  order = std::min(order, L);
  if (order == 0) {
    std::vector<Mode> out;
    if (mean != 0.0) out.push_back(dc_mode(mean));
    return out;
  }

  // shift-invariance of the signal row space: V2 ~= V1 * Psi, eig(Psi) = z_i
  const Eigen::MatrixXd vs = svd.matrixV().leftCols(order);
  const Eigen::MatrixXd v1 = vs.topRows(L);
  const Eigen::MatrixXd v2 = vs.bottomRows(L);
  const Eigen::MatrixXd psi = v1.completeOrthogonalDecomposition().solve(v2);

  Eigen::EigenSolver<Eigen::MatrixXd> eig(psi);
  const auto z = eig.eigenvalues();

  std::vector<std::complex<double>> poles;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) continue;
    if (std::abs(z[i]) < 1e-12) continue;
    poles.push_back(z[i]);
  }
  if (poles.empty()) {
    std::vector<Mode> out;
    if (mean != 0.0) out.push_back(dc_mode(mean));
    return out;
  }

  // residues from the full record
  const auto p = static_cast<Eigen::Index>(poles.size());
  Eigen::MatrixXcd vand(m_total, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    std::complex<double> zk{1.0, 0.0};
    for (Eigen::Index k = 0; k < m_total; ++k) {
      vand(k, i) = zk;
      zk *= poles[i];
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(vand);
  qr.setThreshold(1e-10);
  const bool rank_deficient = qr.rank() < p;
  const Eigen::VectorXcd residues = qr.solve(x.cast<std::complex<double>>());

  const double f_eps = 1e-9 * rate;
  std::vector<Mode> modes;
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const std::complex<double> s = rate * std::log(poles[i]);
    const double freq = std::abs(s.imag()) / kTwoPi;
    Mode m;
    m.damping = s.real();
    m.flagged = rank_deficient;
    if (freq < f_eps) {
      m.frequency = 0.0;
      m.amplitude = std::abs(residues[static_cast<Eigen::Index>(i)].real());
      m.phase = residues[static_cast<Eigen::Index>(i)].real() >= 0.0 ? 0.0 : kPi;
      modes.push_back(m);
      continue;
    }
    // locate the conjugate partner
    std::size_t partner = i;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(poles[j] - std::conj(poles[i]));
      if (d < best) {
        best = d;
        partner = j;
      }
    }
    const std::complex<double> c_pos =
        s.imag() > 0.0 ? residues[static_cast<Eigen::Index>(i)]
                       : (partner != i ? residues[static_cast<Eigen::Index>(partner)]
                                       : std::conj(residues[static_cast<Eigen::Index>(i)]));
    m.frequency = freq;
    if (partner != i && best < 1e-6 * std::abs(poles[i])) {
      used[partner] = true;
      const std::complex<double> s2 = rate * std::log(poles[partner]);
      m.damping = 0.5 * (s.real() + s2.real());
      m.amplitude = std::abs(residues[static_cast<Eigen::Index>(i)]) +
                    std::abs(residues[static_cast<Eigen::Index>(partner)]);
    } else {
      // unpaired complex pole (should not happen for real data)
      m.amplitude = 2.0 * std::abs(residues[static_cast<Eigen::Index>(i)]);
      m.flagged = true;
    }
    m.phase = wrap_phase(std::arg(c_pos));
    modes.push_back(m);
  }

  // restore the subtracted mean as (part of) the 0-Hz mode
  if (mean != 0.0) {
    auto it = std::find_if(modes.begin(), modes.end(), [&](const Mode& m) {
      return m.frequency == 0.0 && std::abs(m.damping) < 1e-9;
    });
    if (it != modes.end()) {
      const double combined = it->amplitude * std::cos(it->phase) + mean;
      it->amplitude = std::abs(combined);
      it->phase = combined >= 0.0 ? 0.0 : kPi;
    } else {
      modes.push_back(dc_mode(mean));
    }
  }

  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    return a.frequency < b.frequency;
  });
  return modes;
}

Mode dominant_mode(std::span<const Mode> modes, double f_min, double f_max) {
  const Mode* best = nullptr;
  for (const auto& m : modes) {
    if (!(m.frequency > f_min && m.frequency < f_max)) continue;
    if (best == nullptr || m.amplitude > best->amplitude ||
        (m.amplitude == best->amplitude && m.frequency < best->frequency))
      best = &m;
  }
  if (best == nullptr) throw NumericalError("no mode inside the frequency band");
  return *best;
}

}  // namespace pmulab
