#ifndef PMULAB_TYPES_HPP
#define PMULAB_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmulab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Bad input or violated precondition (CLI maps this to exit status 2).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure such as non-convergence (CLI maps this to exit status 1).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Estimation failure carrying the pipeline step it occurred in.
class EstimationError : public NumericalError {
public:
  EstimationError(int step, const std::string& what)
      : NumericalError("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

private:
  int step_;
};

class NoOscillationError : public EstimationError {
public:
  explicit NoOscillationError(int step) : EstimationError(step, "no oscillation detected") {}
};

/// Uniformly sampled real-valued point-on-wave record.
struct SampledWaveform {
  double fs = 0.0;  // sample rate [Hz]
  double t0 = 0.0;  // time of samples[0] [s]
  std::vector<double> samples;

  double ts() const { return 1.0 / fs; }
  double duration() const { return static_cast<double>(samples.size()) / fs; }
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) / fs; }
  double end_time() const { return t0 + static_cast<double>(samples.size() - 1) / fs; }

  void validate() const {
    if (!(fs > 0.0)) throw InputError("sample rate must be positive");
    if (samples.size() < 2) throw InputError("waveform needs at least 2 samples");
  }
};

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

}  // namespace pmulab

#endif
