#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cavsim/config.hpp"
#include "cavsim/error.hpp"
#include "cavsim/model.hpp"
#include "cavsim/simulation.hpp"
#include "cavsim/spectrum.hpp"
#include "helpers.hpp"

using namespace cavsim;

namespace {

CorrelationSeries synthetic(double span, double dtau, auto fn) {
  CorrelationSeries c;
  c.dtau = dtau;
  const auto n = static_cast<std::size_t>(std::llround(span / dtau));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = dtau * static_cast<double>(k);
    c.tau.push_back(t);
    c.g1.push_back(fn(t));
  }
  return c;
}

std::vector<Feature> peaks_of(const SpectrumResult& s, double min_prominence = 0.05) {
  FeatureOptions fo;
  fo.min_prominence = min_prominence;
  std::vector<Feature> out;
  for (const auto& f : locate_features(s, fo)) {
    if (f.kind == FeatureKind::peak) out.push_back(f);
  }
  return out;
}

SystemParams empty_cavity() {
  SystemParams p;
  p.g = 0.0;
  p.kappa = 10.0;
  p.delta_c = -10.0;
  p.init_n_phot = 1.0;
  p.pin_atoms = true;
  return p;
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("mode tags round-trip") {
  CHECK(mode_tag_from_string(to_string(ModeTag::main)) == ModeTag::main);
  CHECK(mode_tag_from_string(to_string(ModeTag::filter)) == ModeTag::filter);
  CHECK_THROWS_AS(mode_tag_from_string("side"), ConfigError);
}

TEST_CASE("frequency grid is symmetric with resolution 2 pi / T") {
  const auto c = synthetic(200.0, 0.02, [](double t) { return cplx{std::exp(-t)}; });
  const SpectrumResult s = spectrum_from_g1(c);
  CHECK(s.resolution == doctest::Approx(2.0 * std::numbers::pi / 200.0));
  REQUIRE(s.omega.size() % 2 == 1);
  const std::size_t mid = s.omega.size() / 2;
  CHECK(s.omega[mid] == 0.0);
  for (std::size_t i = 0; i < mid; ++i) CHECK(s.omega[i] == -s.omega[s.omega.size() - 1 - i]);
  CHECK(s.normalized);
  CHECK(*std::max_element(s.s.begin(), s.s.end()) == doctest::Approx(1.0));
}

TEST_CASE("exponential decay gives a Lorentzian of width kappa") {
  const auto c = synthetic(200.0, 0.02, [](double t) { return cplx{std::exp(-5.0 * t)}; });
  const SpectrumResult s = spectrum_from_g1(c);
  const auto peaks = peaks_of(s);
  REQUIRE(peaks.size() == 1);
  CHECK(std::abs(peaks[0].omega) <= s.resolution);
  CHECK(std::abs(peaks[0].width - 10.0) <= s.resolution);
}

TEST_CASE("constant correlation gives a peak one bin wide") {
  const double span = 100.0;
  const auto c = synthetic(span, 0.05, [](double) { return cplx{1.0}; });
  const SpectrumResult s = spectrum_from_g1(c);
  const std::size_t zero = s.bin_of(0.0);
  CHECK(s.s[zero] == doctest::Approx(1.0));
  // Every other grid point is a zero of the finite-window transform.
  for (std::size_t i = 0; i < s.s.size(); ++i) {
    if (i != zero) CHECK(std::abs(s.s[i]) < 1e-9);
  }
  CHECK(s.s_raw[zero] == doctest::Approx(2.0 * span));
}

TEST_CASE("transform is linear before normalization") {
  auto f = [](double t) { return std::exp(cplx{-0.7, 3.0} * t) + 0.3 * std::exp(cplx{-2.0, -8.0} * t); };
  const auto c1 = synthetic(50.0, 0.02, f);
  const auto c2 = synthetic(50.0, 0.02, [&](double t) { return 2.5 * f(t); });
  SpectrumOptions raw;
  raw.normalize = false;
  const SpectrumResult s1 = spectrum_from_g1(c1, raw);
  const SpectrumResult s2 = spectrum_from_g1(c2, raw);
  CHECK_FALSE(s1.normalized);
  for (std::size_t i = 0; i < s1.s.size(); ++i) {
    CHECK(s2.s_raw[i] == doctest::Approx(2.5 * s1.s_raw[i]).epsilon(1e-12));
    CHECK(s1.s[i] == s1.s_raw[i]);
  }
}

TEST_CASE("integrated spectrum recovers g1(0)") {
  const auto c = synthetic(200.0, 0.02, [](double t) {
    return 0.8 * std::exp(cplx{-0.5, 4.0} * t) + 0.4 * std::exp(cplx{-1.5, -6.0} * t);
  });
  REQUIRE(std::abs(c.g1.back()) < 1e-3 * std::abs(c.g1.front()));
  SpectrumOptions raw;
  raw.normalize = false;
  const SpectrumResult s = spectrum_from_g1(c, raw);
  double integral = 0.0;
  for (double v : s.s_raw) integral += v * s.resolution;
  CHECK(integral / (2.0 * std::numbers::pi) == doctest::Approx(c.g1.front().real()).epsilon(0.02));
}

TEST_CASE("apodization broadens a line by twice the rate") {
  const auto c = synthetic(200.0, 0.02, [](double t) { return cplx{std::exp(-2.0 * t)}; });
  SpectrumOptions apo;
  apo.apodization_rate = 0.5;
  const auto peaks = peaks_of(spectrum_from_g1(c, apo));
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].width == doctest::Approx(5.0).epsilon(0.02));
}

TEST_CASE("spectrum needs at least three samples") {
  CorrelationSeries c;
  c.dtau = 0.1;
  c.tau = {0.0, 0.1};
  c.g1 = {1.0, 1.0};
  CHECK_THROWS_AS(spectrum_from_g1(c), Error);
}

TEST_CASE("a single Lorentzian yields one feature at its center") {
  const double center = 7.3;
  const auto c = synthetic(200.0, 0.02, [&](double t) { return std::exp(cplx{-1.0, center} * t); });
  const SpectrumResult s = spectrum_from_g1(c);
  const auto f = locate_features(s);
  REQUIRE(f.size() == 1);
  CHECK(f[0].kind == FeatureKind::peak);
  CHECK(std::abs(f[0].omega - center) <= s.resolution);
  CHECK(f[0].value == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("two separated Lorentzians yield two peaks and a dip between them") {
  const auto c = synthetic(200.0, 0.02, [](double t) {
    return std::exp(cplx{-1.0, 10.0} * t) + 0.6 * std::exp(cplx{-1.0, -10.0} * t);
  });
  const SpectrumResult s = spectrum_from_g1(c);
  const auto peaks = peaks_of(s);
  REQUIRE(peaks.size() == 2);
  std::vector<double> at{peaks[0].omega, peaks[1].omega};
  std::sort(at.begin(), at.end());
  CHECK(at[0] == doctest::Approx(-10.0).epsilon(0.01));
  CHECK(at[1] == doctest::Approx(10.0).epsilon(0.01));

  FeatureOptions window;
  window.omega_min = 0.0;
  window.omega_max = 20.0;
  const auto right = locate_features(s, window);
  REQUIRE(right.size() == 1);
  CHECK(right[0].omega == doctest::Approx(10.0).epsilon(0.01));

  const auto all = locate_features(s);
  CHECK(std::count_if(all.begin(), all.end(), [](const Feature& f) {
          return f.kind == FeatureKind::dip && std::abs(f.omega) < 5.0;
        }) == 1);
}

TEST_CASE("window-relative prominence picks up weak structure") {
  const auto c = synthetic(200.0, 0.02, [](double t) {
    return std::exp(cplx{-1.0, 0.0} * t) + 0.02 * std::exp(cplx{-1.0, 20.0} * t) +
           0.02 * std::exp(cplx{-1.0, 26.0} * t);
  });
  const SpectrumResult s = spectrum_from_g1(c);
  FeatureOptions fo;
  fo.omega_min = 15.0;
  fo.omega_max = 30.0;
  fo.min_prominence = 0.05;
  CHECK(locate_features(s, fo).empty());
  fo.window_relative = true;
  int peaks = 0;
  for (const auto& f : locate_features(s, fo)) peaks += f.kind == FeatureKind::peak;
  CHECK(peaks == 2);
}

TEST_CASE("empty cavity correlation is analytic") {
  const SystemParams p = empty_cavity();
  const StateLayout l = layout_for(p, Closure::second_order);
  const auto s0 = init_state(p, l);
  const CorrelationSeries g1 = correlation_function(p, l, s0, 0.0, {}, IntegratorSettings{});
  CHECK(g1.tau.size() == 10001);
  CHECK(g1.dtau == doctest::Approx(0.02));
  double worst = 0.0;
  for (std::size_t i = 0; i < g1.tau.size(); ++i) {
    const cplx want = std::exp(cplx{-0.5 * p.kappa, -p.delta_c} * g1.tau[i]);
    worst = std::max(worst, std::abs(g1.g1[i] - want));
  }
  CHECK(worst < 1e-6);
  CHECK(g1.stationarity_warning);  // the photon number decays away
}

TEST_CASE("empty cavity line sits at the cavity frequency with width kappa") {
  const SystemParams p = empty_cavity();
  const StateLayout l = layout_for(p, Closure::second_order);
  const auto s0 = init_state(p, l);
  const SpectrumResult s =
      spectrum_from_g1(correlation_function(p, l, s0, 0.0, {}, IntegratorSettings{}));
  const auto peaks = peaks_of(s, 0.5);
  REQUIRE(peaks.size() == 1);
  CHECK(std::abs(peaks[0].omega + p.delta_c) <= s.resolution);
  CHECK(std::abs(peaks[0].width - p.kappa) <= 0.05 * p.kappa);
}

TEST_CASE("dark atom and vacuum give a vanishing correlation") {
  SystemParams p;
  p.g = 1.0;
  p.omega_pump = 0.0;
  p.pin_atoms = true;
  const StateLayout l = layout_for(p, Closure::second_order);
  const auto s0 = init_state(p, l);
  CorrelationSettings cs;
  cs.span = 20.0;
  const CorrelationSeries g1 = correlation_function(p, l, s0, 0.0, cs, IntegratorSettings{});
  for (const cplx& v : g1.g1) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("g1(0) equals the photon number at t0") {
  Config c = testing::fig1_config(6);
  c.system.t_final = 30.0;
  const RunResult run = simulate(c);
  CorrelationSettings cs;
  cs.span = 5.0;
  const CorrelationSeries g1 =
      correlation_function(c.system, run.layout, run.final_state, c.system.t_final, cs, c.integrator);
  const double n = ConstStateRef(run.layout, run.final_state).n_phot();
  CHECK(std::abs(g1.g1[0].real() - n) < 1e-8);
  CHECK(std::abs(g1.g1[0].imag()) < 1e-8);
  CHECK(g1.t0 == c.system.t_final);
}

TEST_CASE("filter-mode g1(0) equals the filter photon number") {
  Config c = testing::fig1_config(4);
  c.system.g = 2.0;
  c.system.delta_c2 = -20.0;
  c.system.t_final = 20.0;
  c.system.avg_window = 10.0;
  const RunResult run = simulate(c);
  CorrelationSettings cs;
  cs.span = 5.0;
  cs.mode = ModeTag::filter;
  const CorrelationSeries g1 =
      correlation_function(c.system, run.layout, run.final_state, c.system.t_final, cs, c.integrator);
  CHECK(g1.mode == ModeTag::filter);
  CHECK(std::abs(g1.g1[0].real() - ConstStateRef(run.layout, run.final_state).n_phot_b()) < 1e-8);
}

TEST_CASE("repetitions average consecutive start times") {
  const SystemParams p = empty_cavity();
  const StateLayout l = layout_for(p, Closure::second_order);
  const auto s0 = init_state(p, l);
  CorrelationSettings cs;
  cs.span = 2.0;
  cs.repetitions = 2;
  cs.repetition_spacing = 0.1;
  const CorrelationSeries g1 = correlation_function(p, l, s0, 0.0, cs, IntegratorSettings{});
  // n(t0) averaged over t0 = 0 and 0.1: (1 + exp(-kappa 0.1)) / 2.
  CHECK(g1.g1[0].real() == doctest::Approx(0.5 * (1.0 + std::exp(-1.0))).epsilon(1e-6));
}

TEST_CASE("correlation input checks") {
  SystemParams p = testing::fig1_params(2);
  const StateLayout mf = layout_for(p, Closure::mean_field);
  const StateLayout so = layout_for(p, Closure::second_order);
  CHECK_THROWS_AS(correlation_function(p, mf, std::vector<double>(mf.size), 0.0, {}, {}), Error);
  CorrelationSettings filter;
  filter.mode = ModeTag::filter;
  CHECK_THROWS_AS(correlation_function(p, so, std::vector<double>(so.size), 0.0, filter, {}), Error);
  CorrelationSettings bad;
  bad.dtau = 0.0;
  CHECK_THROWS_AS(correlation_function(p, so, std::vector<double>(so.size), 0.0, bad, {}), ConfigError);
}

TEST_CASE("ordered desk run shows a coherent plateau") {
  const Config c = load_config_file(CAVSIM_CONFIG_DIR "/fig1_desk.json");
  const RunSummary run = simulate_summary(c);
  const StateLayout l = layout_for(c.system, c.engine);
  const CorrelationSeries g1 =
      correlation_function(c.system, l, run.final_state, c.system.t_final, {}, c.integrator);
  // The coherent part |<a>|^2 survives at long delays.
  const double late = std::abs(g1.g1.back());
  CHECK(late > 0.3 * g1.g1.front().real());
  CHECK(late < 2.0 * g1.g1.front().real());
}

}  // TEST_SUITE
