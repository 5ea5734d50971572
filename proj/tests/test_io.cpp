#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>

#include "pmulab/io.hpp"

using namespace pmulab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("pmulab_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("waveform CSV round trip") {
  TempDir dir;
  SampledWaveform w;
  w.fs = 2000.0;
  w.t0 = 0.125;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  w.samples.resize(500);
  for (auto& v : w.samples) v = dist(rng);

  const auto path = dir.path / "wave.csv";
  io::write_waveform_csv(path, w);
  const auto r = io::read_waveform_csv(path);
  CHECK(r.fs == doctest::Approx(w.fs).epsilon(1e-12));
  CHECK(r.t0 == doctest::Approx(w.t0).epsilon(1e-12));
  REQUIRE(r.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    CHECK(r.samples[i] == doctest::Approx(w.samples[i]).epsilon(1e-12));
}

TEST_CASE("phasor CSV round trip") {
  TempDir dir;
  PhasorSeries s;
  s.rate = 30.0;
  for (int i = 0; i < 60; ++i)
    s.points.push_back(PhasorPoint{static_cast<double>(i) / 30.0, std::cos(0.1 * i),
                                   std::sin(0.07 * i)});
  const auto path = dir.path / "ph.csv";
  io::write_phasor_csv(path, s);
  const auto r = io::read_phasor_csv(path);
  CHECK(r.rate == doctest::Approx(30.0).epsilon(1e-9));
  REQUIRE(r.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(r.points[i].xr == doctest::Approx(s.points[i].xr).epsilon(1e-12));
    CHECK(r.points[i].xi == doctest::Approx(s.points[i].xi).epsilon(1e-12));
  }
}

TEST_CASE("malformed CSV input is diagnosed") {
  TempDir dir;
  const auto path = dir.path / "bad.csv";
  {
    std::ofstream out(path);
    out << "time,value\n0,1\n0.001,oops\n";
  }
  CHECK_THROWS_WITH_AS(io::read_waveform_csv(path),
                       doctest::Contains("row 3"), InputError);
  {
    std::ofstream out(path);
    out << "time,value\n0,1\n0.001\n";
  }
  CHECK_THROWS_AS(io::read_waveform_csv(path), InputError);
  {
    std::ofstream out(path);
    out << "t,v\n0,1\n";
  }
  CHECK_THROWS_AS(io::read_waveform_csv(path), InputError);
}

TEST_CASE("phase strings as fractions of pi") {
  CHECK(io::parse_phase_text("pi") == doctest::Approx(kPi));
  CHECK(io::parse_phase_text("pi/3") == doctest::Approx(kPi / 3.0));
  CHECK(io::parse_phase_text("-3pi/20") == doctest::Approx(-3.0 * kPi / 20.0));
  CHECK(io::parse_phase_text("11*pi/30") == doctest::Approx(11.0 * kPi / 30.0));
  CHECK(io::parse_phase_text("0.5pi") == doctest::Approx(kPi / 2.0));
  CHECK(io::parse_phase_text("+2pi/5") == doctest::Approx(2.0 * kPi / 5.0));
  CHECK_THROWS_AS(io::parse_phase_text("1.57"), InputError);
  CHECK_THROWS_AS(io::parse_phase_text("pi/0"), InputError);
  CHECK_THROWS_AS(io::parse_phase_text("two pies"), InputError);
}

TEST_CASE("signal configuration parsing") {
  SUBCASE("amplitude-modulated model") {
    const auto cfg = io::parse_signal_config(R"({
      "model": "am", "f1": 60, "A": 2, "phi1": "pi/4", "m": 0.05,
      "f_os": 2, "phi2": "pi/5", "fs": 2000, "duration": 1
    })");
    const auto& p = std::get<AmplitudeModSignal>(cfg.model);
    CHECK(p.A == 2.0);
    CHECK(p.phi1 == doctest::Approx(kPi / 4.0));
    CHECK(cfg.fs == 2000.0);
    CHECK(cfg.t0 == 0.0);
    const auto w = cfg.synthesize();
    CHECK(w.samples.size() == 2000);
  }
  SUBCASE("general model") {
    const auto cfg = io::parse_signal_config(R"({
      "model": "general", "a": 2, "f1": 60, "phi1": "pi/3", "f_os": 40,
      "phi_os": "pi/6", "h": 0.1, "b1": 0.25, "phi_sub": "3pi/10",
      "b2": 0.25, "phi_sup": "11pi/30", "fs": 7680, "duration": 0.5
    })");
    const auto& p = std::get<GeneralOscSignal>(cfg.model);
    CHECK(p.h == 0.1);
    CHECK(p.phi_sup == doctest::Approx(11.0 * kPi / 30.0));
  }
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(io::parse_signal_config(R"({
      "model": "am", "f1": 60, "A": 2, "phi1": 0, "m": 0, "f_os": 0,
      "phi2": 0, "fs": 2000, "duration": 1, "extra": 5
    })"),
                         doctest::Contains("unknown key"), InputError);
  }
  SUBCASE("missing keys are rejected") {
    CHECK_THROWS_WITH_AS(io::parse_signal_config(R"({
      "model": "am", "f1": 60, "A": 2, "phi1": 0, "m": 0, "f_os": 0,
      "fs": 2000, "duration": 1
    })"),
                         doctest::Contains("phi2"), InputError);
  }
  SUBCASE("bad model name") {
    CHECK_THROWS_AS(io::parse_signal_config(R"({"model": "sawtooth", "fs": 1, "duration": 1})"),
                    InputError);
  }
  SUBCASE("bad JSON") {
    CHECK_THROWS_AS(io::parse_signal_config("not json"), InputError);
  }
}

TEST_CASE("run reports serialize losslessly") {
  io::RunReport rep;
  rep.version = "0.1.0";
  rep.input = "wave.csv";
  rep.input_hash = "00ff";
  rep.f_nominal = 60.0;
  rep.result.f1_est = 60.000000123456;
  rep.result.f_os_est = 39.99999999871;
  rep.result.params.a = 1.999999999999313;
  rep.result.params.h = 0.100000000000271;
  rep.result.e_pow_pct = 1.32e-10;
  rep.result.iterations = 17;
  rep.result.converged = true;
  const auto text = io::run_report_json(rep);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["f1_est"].get<double>() == rep.result.f1_est);
  CHECK(j["params"]["a"].get<double>() == rep.result.params.a);
  CHECK(j["params"]["h"].get<double>() == rep.result.params.h);
  CHECK(j["e_pow_pct"].get<double>() == rep.result.e_pow_pct);
  CHECK(j["iterations"].get<int>() == 17);
  CHECK(j["converged"].get<bool>() == true);
}

TEST_CASE("csv column access for the spectrum command") {
  TempDir dir;
  const auto path = dir.path / "ph.csv";
  {
    std::ofstream out(path);
    out << "time,amplitude,phase,real,imag\n";
    for (int i = 0; i < 10; ++i)
      out << 0.1 * i << ',' << 1.0 + i << ",0,0,0\n";
  }
  const auto col = io::read_csv_column(path, "amplitude");
  CHECK(col.rate == doctest::Approx(10.0));
  CHECK(col.values.size() == 10);
  CHECK(col.values[3] == doctest::Approx(4.0));
  CHECK_THROWS_WITH_AS(io::read_csv_column(path, "bogus"), doctest::Contains("bogus"), InputError);
}

TEST_CASE("file hashing is deterministic") {
  TempDir dir;
  const auto path = dir.path / "x.bin";
  {
    std::ofstream out(path);
    out << "payload";
  }
  CHECK(io::file_hash(path) == io::file_hash(path));
  CHECK(io::fnv1a("payload") != io::fnv1a("payloae"));
}
