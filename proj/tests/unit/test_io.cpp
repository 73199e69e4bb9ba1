#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "cavsim/error.hpp"
#include "cavsim/io.hpp"
#include "cavsim/version.hpp"
#include "helpers.hpp"

using namespace cavsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cavsim_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

ScanGrid fake_grid() {
  ScanGrid g;
  g.spec.axis1 = {ScanParam::delta_c, -10.0, -2.0, 2};
  g.spec.axis2 = {ScanParam::omega_pump, 1.0, 3.0, 3};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      ScanCell c;
      c.i1 = i;
      c.i2 = j;
      c.param1 = g.spec.axis1.value(i);
      c.param2 = g.spec.axis2.value(j);
      c.seed = 100 + 3 * i + j;
      c.obs.abs_theta = 0.1 * j;
      c.obs.e_kin = 5.0 * (i + j);
      c.obs.n_phot = 0.01;
      c.delta = -1.0;
      c.threshold_margin = 0.5;
      g.cells.push_back(c);
    }
  }
  g.cells[4].ok = false;
  g.cells[4].failure = "physicality: negative photon number";
  return g;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("trajectory CSV layout") {
  TempDir dir;
  Config c = testing::fig1_config(3);
  c.system.t_final = 2.0;
  c.system.avg_window = 1.0;
  const RunResult run = simulate(c);
  const fs::path p = dir.path / "traj.csv";
  io::write_trajectory_csv(p, run);
  const auto lines = lines_of(p);
  REQUIRE(lines.size() == run.trajectory.times.size() + 1);
  const auto header = split(lines[0]);
  CHECK(header[0] == "t");
  CHECK(header[1] == "flag");
  CHECK(header.size() == 2 + run.layout.size + 5);
  CHECK(header.back() == "obs_inversion");
  for (std::size_t i = 1; i < lines.size(); ++i) CHECK(split(lines[i]).size() == header.size());
  const auto last = split(lines.back());
  CHECK(std::stod(last[0]) == run.trajectory.times.back());
  CHECK(std::stod(last[2]) == run.trajectory.samples.back()[0]);
}

TEST_CASE("two-mode trajectory carries the filter photon number") {
  TempDir dir;
  Config c = testing::fig1_config(2);
  c.system.delta_c2 = -20.0;
  c.system.t_final = 1.0;
  c.system.avg_window = 0.5;
  const fs::path p = dir.path / "traj2.csv";
  io::write_trajectory_csv(p, simulate(c));
  CHECK(split(lines_of(p)[0]).back() == "obs_n_phot_b");
}

TEST_CASE("scan CSV marks failed cells") {
  TempDir dir;
  const fs::path p = dir.path / "scan.csv";
  io::write_scan_csv(p, fake_grid());
  const auto lines = lines_of(p);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] ==
        "delta_c,omega_pump,abs_theta,theta,n_phot,e_kin,inversion,delta,threshold_margin,seed,status");
  const auto ok = split(lines[1]);
  CHECK(ok[0] == "-10");
  CHECK(ok[1] == "1");
  CHECK(ok[9] == "100");
  CHECK(ok[10] == "ok");
  const auto bad = split(lines[5]);
  for (int k = 2; k <= 8; ++k) CHECK(bad[k] == "nan");
  CHECK(bad[10] == "physicality");
}

TEST_CASE("heat map clips kinetic energy and writes NaN sentinels") {
  TempDir dir;
  const ScanGrid g = fake_grid();
  const fs::path p = dir.path / "ekin.csv";
  io::write_scan_heatmap(p, g, "e_kin", 10.0);
  const auto lines = lines_of(p);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "delta_c\\omega_pump,1,2,3");
  CHECK(lines[1] == "-10,0,5,10");
  CHECK(lines[2] == "-2,5,nan,10");  // 15 is clipped at the cap
  CHECK(g.at(1, 2).obs.e_kin == 15.0);

  io::write_scan_heatmap(p, g, "e_kin", 0.0);
  CHECK(lines_of(p)[2] == "-2,5,nan,15");
  CHECK_THROWS_AS(io::write_scan_heatmap(p, g, "entropy"), ConfigError);
}

TEST_CASE("correlation and spectrum CSV") {
  TempDir dir;
  CorrelationSeries c;
  c.tau = {0.0, 0.5};
  c.g1 = {cplx{1.0, 0.0}, cplx{0.25, -0.5}};
  io::write_correlation_csv(dir.path / "g1.csv", c);
  const auto g1 = lines_of(dir.path / "g1.csv");
  REQUIRE(g1.size() == 3);
  CHECK(g1[0] == "tau,g1_re,g1_im");
  CHECK(g1[2] == "0.5,0.25,-0.5");

  SpectrumResult s;
  s.omega = {-1.0, 0.0, 1.0};
  s.s_raw = {1.0, 4.0, 2.0};
  s.s = {0.25, 1.0, 0.5};
  io::write_spectrum_csv(dir.path / "s.csv", s);
  const auto sl = lines_of(dir.path / "s.csv");
  CHECK(sl[0] == "omega,s_normalized,s_raw");
  CHECK(sl[3] == "1,0.5,2");
}

TEST_CASE("metadata sidecar embeds the resolved configuration") {
  TempDir dir;
  const Config c = testing::fig1_config(5);
  const nlohmann::json m = io::metadata("run", c, {{"seed_list", {1, 2}}});
  CHECK(m["tool"] == "cavsim");
  CHECK(m["version"] == kVersion);
  CHECK(m["command"] == "run");
  CHECK(m["seed_list"].size() == 2);
  CHECK(load_config(m["config"].dump()) == c);
  io::write_json(dir.path / "meta.json", m);
  std::ifstream in(dir.path / "meta.json");
  CHECK(nlohmann::json::parse(in) == m);
}

TEST_CASE("features, reports and scan specs serialize") {
  const nlohmann::json f = io::features_to_json({{FeatureKind::dip, -20.0, 0.1, 1.0, 0.01}});
  CHECK(f[0]["kind"] == "dip");
  CHECK(f[0]["omega"] == -20.0);
  oracle::ComparisonReport r;
  r.pass = false;
  r.gated_score = 0.07;
  r.variables.push_back({"pop_0", 0.01, 0.07, true, false});
  const nlohmann::json rj = io::report_to_json(r);
  CHECK(rj["variables"][0]["name"] == "pop_0");
  CHECK(rj["pass"] == false);
  const nlohmann::json sj = io::scan_spec_to_json(fake_grid().spec);
  CHECK(sj["axis2"]["param"] == "omega_pump");
  CHECK(sj["seeds"] == "cell_keyed");
}

TEST_CASE("unwritable paths raise") {
  CHECK_THROWS_AS(io::write_json("/nonexistent/dir/x.json", nlohmann::json::object()), Error);
}

}  // TEST_SUITE
