#include "pmulab/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace pmulab::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_field(const std::string& text, const std::filesystem::path& path, std::size_t row,
                   std::size_t col) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw InputError(path.string() + ": row " + std::to_string(row) + ", column " +
                     std::to_string(col + 1) + ": not a number: '" + text + "'");
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
  table.header = split_csv_line(line);
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != table.header.size())
      throw InputError(path.string() + ": row " + std::to_string(row_no) + ": expected " +
                       std::to_string(table.header.size()) + " columns, got " +
                       std::to_string(fields.size()));
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      values[c] = parse_field(fields[c], path, row_no, c);
    table.rows.push_back(std::move(values));
  }
  return table;
}

double infer_rate(const std::vector<std::vector<double>>& rows, const std::filesystem::path& path) {
  if (rows.size() < 2) throw InputError(path.string() + ": need at least 2 rows");
  const double dt = rows[1][0] - rows[0][0];
  if (!(dt > 0.0)) throw InputError(path.string() + ": time column must be increasing");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = rows[i][0] - rows[i - 1][0];
    if (std::abs(d - dt) > 1e-6 * dt + 1e-12)
      throw InputError(path.string() + ": non-uniform time spacing at row " + std::to_string(i + 2));
  }
  return 1.0 / dt;
}

}  // namespace

void write_waveform_csv(const std::filesystem::path& path, const SampledWaveform& w) {
  auto out = open_out(path);
  out << "time,value\n";
  for (std::size_t k = 0; k < w.samples.size(); ++k)
    out << format_double(w.time_at(k)) << ',' << format_double(w.samples[k]) << '\n';
}

SampledWaveform read_waveform_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  if (table.header.size() != 2 || table.header[0] != "time" || table.header[1] != "value")
    throw InputError(path.string() + ": expected header 'time,value'");
  SampledWaveform w;
  w.fs = infer_rate(table.rows, path);
  w.t0 = table.rows.front()[0];
  w.samples.reserve(table.rows.size());
  for (const auto& r : table.rows) w.samples.push_back(r[1]);
  w.validate();
  return w;
}

void write_phasor_csv(const std::filesystem::path& path, const PhasorSeries& s) {
  auto out = open_out(path);
  out << "time,amplitude,phase,real,imag\n";
  for (const auto& p : s.points)
    out << format_double(p.timestamp) << ',' << format_double(p.amplitude()) << ','
        << format_double(p.phase()) << ',' << format_double(p.xr) << ',' << format_double(p.xi)
        << '\n';
}

PhasorSeries read_phasor_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const std::vector<std::string> expect{"time", "amplitude", "phase", "real", "imag"};
  if (table.header != expect)
    throw InputError(path.string() + ": expected header 'time,amplitude,phase,real,imag'");
  PhasorSeries s;
  s.rate = infer_rate(table.rows, path);
  s.points.reserve(table.rows.size());
  for (const auto& r : table.rows) s.points.push_back(PhasorPoint{r[0], r[3], r[4]});
  return s;
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const std::vector<SpectrumPoint>& spec) {
  auto out = open_out(path);
  out << "frequency,magnitude\n";
  for (const auto& p : spec)
    out << format_double(p.frequency) << ',' << format_double(p.magnitude) << '\n';
}

CsvColumn read_csv_column(const std::filesystem::path& path, const std::string& column) {
  const auto table = read_csv(path);
  if (table.header.empty() || table.header[0] != "time")
    throw InputError(path.string() + ": first column must be 'time'");
  std::size_t idx = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == column) idx = c;
  if (idx == table.header.size())
    throw InputError(path.string() + ": no column named '" + column + "'");
  CsvColumn out;
  out.rate = infer_rate(table.rows, path);
  out.values.reserve(table.rows.size());
  for (const auto& r : table.rows) out.values.push_back(r[idx]);
  return out;
}

double parse_phase_text(const std::string& text) {
  // [sign][number]["*"]"pi"["/" number]
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(c));
  const auto pi_pos = s.find("pi");
  if (pi_pos == std::string::npos)
    throw InputError("phase string must contain 'pi': '" + text + "'");

  double sign = 1.0;
  std::string num = s.substr(0, pi_pos);
  if (!num.empty() && (num.front() == '+' || num.front() == '-')) {
    if (num.front() == '-') sign = -1.0;
    num.erase(num.begin());
  }
  if (!num.empty() && num.back() == '*') num.pop_back();
  double numerator = 1.0;
  if (!num.empty()) {
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), numerator);
    if (ec != std::errc{} || ptr != num.data() + num.size())
      throw InputError("bad phase numerator: '" + text + "'");
  }

  double denominator = 1.0;
  std::string rest = s.substr(pi_pos + 2);
  if (!rest.empty()) {
    if (rest.front() != '/') throw InputError("bad phase syntax: '" + text + "'");
    rest.erase(rest.begin());
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), denominator);
    if (ec != std::errc{} || ptr != rest.data() + rest.size() || denominator == 0.0)
      throw InputError("bad phase denominator: '" + text + "'");
  }
  return sign * numerator * kPi / denominator;
}

namespace {

double get_number(const json& j, const std::string& key, bool phase = false) {
  if (!j.contains(key)) throw InputError("config: missing key '" + key + "'");
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && phase) return parse_phase_text(v.get<std::string>());
  throw InputError("config: key '" + key + "' must be a number" +
                   (phase ? " or a pi-fraction string" : ""));
}

void check_keys(const json& j, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw InputError("config: unknown key '" + key + "'");
}

}  // namespace

SignalConfig parse_signal_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config: top level must be an object");
  if (!j.contains("model") || !j.at("model").is_string())
    throw InputError("config: missing string key 'model'");
  const std::string model = j.at("model").get<std::string>();

  SignalConfig cfg;
  const std::set<std::string> common{"model", "fs", "duration", "t0"};
  if (model == "am") {
    std::set<std::string> keys = common;
    keys.insert({"f1", "A", "phi1", "m", "f_os", "phi2"});
    check_keys(j, keys);
    AmplitudeModSignal p;
    p.f1 = get_number(j, "f1");
    p.A = get_number(j, "A");
    p.phi1 = get_number(j, "phi1", true);
    p.m = get_number(j, "m");
    p.f_os = get_number(j, "f_os");
    p.phi2 = get_number(j, "phi2", true);
    p.validate();
    cfg.model = p;
  } else if (model == "three_component") {
    std::set<std::string> keys = common;
    keys.insert({"a", "f1", "phi1", "f_os", "b1", "phi_sub", "b2", "phi_sup"});
    check_keys(j, keys);
    ThreeComponentSignal p;
    p.a = get_number(j, "a");
    p.f1 = get_number(j, "f1");
    p.phi1 = get_number(j, "phi1", true);
    p.f_os = get_number(j, "f_os");
    p.b1 = get_number(j, "b1");
    p.phi_sub = get_number(j, "phi_sub", true);
    p.b2 = get_number(j, "b2");
    p.phi_sup = get_number(j, "phi_sup", true);
    p.validate();
    cfg.model = p;
  } else if (model == "general") {
    std::set<std::string> keys = common;
    keys.insert({"a", "f1", "phi1", "f_os", "phi_os", "h", "b1", "phi_sub", "b2", "phi_sup"});
    check_keys(j, keys);
    GeneralOscSignal p;
    p.a = get_number(j, "a");
    p.f1 = get_number(j, "f1");
    p.phi1 = get_number(j, "phi1", true);
    p.f_os = get_number(j, "f_os");
    p.phi_os = get_number(j, "phi_os", true);
    p.h = get_number(j, "h");
    p.b1 = get_number(j, "b1");
    p.phi_sub = get_number(j, "phi_sub", true);
    p.b2 = get_number(j, "b2");
    p.phi_sup = get_number(j, "phi_sup", true);
    p.validate();
    cfg.model = p;
  } else {
    throw InputError("config: model must be one of am, three_component, general");
  }

  cfg.fs = get_number(j, "fs");
  cfg.duration = get_number(j, "duration");
  cfg.t0 = j.contains("t0") ? get_number(j, "t0") : 0.0;
  if (!(cfg.fs > 0.0)) throw InputError("config: fs must be positive");
  if (!(cfg.duration > 0.0)) throw InputError("config: duration must be positive");
  return cfg;
}

SignalConfig load_signal_config(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_signal_config(ss.str());
}

SampledWaveform SignalConfig::synthesize() const {
  if (std::holds_alternative<AmplitudeModSignal>(model))
    return synthesize_am(std::get<AmplitudeModSignal>(model), fs, duration, t0);
  if (std::holds_alternative<ThreeComponentSignal>(model))
    return synthesize_general(std::get<ThreeComponentSignal>(model).with_angle_mod(0.0, 0.0), fs,
                              duration, t0);
  return synthesize_general(std::get<GeneralOscSignal>(model), fs, duration, t0);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string file_hash(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(ss.str())));
  return buf;
}

std::string run_report_json(const RunReport& report) {
  const auto& r = report.result;
  json j;
  j["tool"] = report.tool;
  j["version"] = report.version;
  j["input"] = report.input;
  j["input_hash"] = report.input_hash;
  j["f_nominal"] = report.f_nominal;
  j["f1_est"] = r.f1_est;
  j["f_os_est"] = r.f_os_est;
  j["params"] = {{"a", r.params.a},           {"f1", r.params.f1},
                 {"phi1", r.params.phi1},     {"f_os", r.params.f_os},
                 {"phi_os", r.params.phi_os}, {"h", r.params.h},
                 {"b1", r.params.b1},         {"phi_sub", r.params.phi_sub},
                 {"b2", r.params.b2},         {"phi_sup", r.params.phi_sup}};
  j["rect"] = {{"A1", r.rect.A1}, {"B1", r.rect.B1}, {"A2", r.rect.A2},
               {"B2", r.rect.B2}, {"A3", r.rect.A3}, {"B3", r.rect.B3},
               {"f1", r.rect.f1}, {"f_os", r.rect.f_os}};
  j["e_pow_pct"] = r.e_pow_pct;
  j["e_ls"] = r.e_ls;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j.dump(2);
}

}  // namespace pmulab::io
