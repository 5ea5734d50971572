#ifndef PMULAB_IO_HPP
#define PMULAB_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "pmulab/estimator.hpp"
#include "pmulab/pmu_pipeline.hpp"
#include "pmulab/signal_model.hpp"

namespace pmulab::io {

/// Doubles in data files carry 15 significant digits so values round-trip.
std::string format_double(double v);

void write_waveform_csv(const std::filesystem::path& path, const SampledWaveform& w);
SampledWaveform read_waveform_csv(const std::filesystem::path& path);

void write_phasor_csv(const std::filesystem::path& path, const PhasorSeries& s);
PhasorSeries read_phasor_csv(const std::filesystem::path& path);

void write_spectrum_csv(const std::filesystem::path& path,
                        const std::vector<SpectrumPoint>& spec);

/// Generic numeric CSV access for the spectrum command: returns the named
/// column plus the rate inferred from a leading `time` column.
struct CsvColumn {
  std::vector<double> values;
  double rate = 0.0;
};
CsvColumn read_csv_column(const std::filesystem::path& path, const std::string& column);

/// Phase values in config files are either plain numbers (radians) or
/// rational multiples of pi written as strings: "pi", "-pi/3", "3pi/10",
/// "11*pi/30", "0.5pi".
double parse_phase_text(const std::string& text);

/// Parsed signal configuration: exactly one of the three models plus the
/// sampling description. Unknown keys are rejected.
struct SignalConfig {
  std::variant<AmplitudeModSignal, ThreeComponentSignal, GeneralOscSignal> model;
  double fs = 0.0;
  double duration = 0.0;
  double t0 = 0.0;

  SampledWaveform synthesize() const;
};
SignalConfig parse_signal_config(const std::string& json_text);
SignalConfig load_signal_config(const std::filesystem::path& path);

/// Structured estimation report with provenance; serialized as JSON.
struct RunReport {
  std::string tool = "pmulab";
  std::string version;
  std::string input;
  std::string input_hash;  // FNV-1a of the input file bytes, hex
  double f_nominal = 0.0;
  EstimationResult result;
};
std::string run_report_json(const RunReport& report);

std::uint64_t fnv1a(const std::string& bytes);
std::string file_hash(const std::filesystem::path& path);

}  // namespace pmulab::io

#endif
