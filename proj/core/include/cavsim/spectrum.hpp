#pragma once

#include <span>
#include <string>
#include <vector>

#include "cavsim/integrator.hpp"
#include "cavsim/layout.hpp"
#include "cavsim/params.hpp"

namespace cavsim {

enum class ModeTag { main, filter };

std::string to_string(ModeTag tag);
ModeTag mode_tag_from_string(const std::string& s);

struct CorrelationSeries {
  std::vector<double> tau;
  std::vector<cplx> g1;  // <c+(t0 + tau) c(t0)> for the tagged mode c
  double t0 = 0.0;
  double dtau = 0.0;
  ModeTag mode = ModeTag::main;
  // Relative change of the tagged mode's photon number between the first and
  // last fifth of the propagation window.
  double photon_drift = 0.0;
  bool stationarity_warning = false;
};

inline constexpr double kStationarityDriftLimit = 0.2;

struct CorrelationSettings {
  double span = 200.0;
  double dtau = 0.02;
  ModeTag mode = ModeTag::main;
  // Number of consecutive start times t0, t0 + spacing, ... whose g1 is averaged.
  int repetitions = 1;
  double repetition_spacing = 10.0;
};

// Two-time correlation by the quantum regression theorem. The regression
// vector {<a+(t0+tau) c>, <b+(t0+tau) c>, <sigma+_m(t0+tau) c>} obeys the
// linear equations of {<a+>, <b+>, <sigma+_m>}; its coefficients (couplings,
// populations) come from the single-time system, which keeps evolving,
// atomic motion included. `state` must be a second-order state at time t0.
CorrelationSeries correlation_function(const SystemParams& p, const StateLayout& layout,
                                       std::span<const double> state, double t0,
                                       const CorrelationSettings& cs,
                                       const IntegratorSettings& set);

struct SpectrumOptions {
  bool normalize = true;
  // Multiplies g1 by exp(-rate * tau) before the transform; broadens every
  // line by 2 * rate (FWHM). Zero disables.
  double apodization_rate = 0.0;
};

struct SpectrumResult {
  std::vector<double> omega;  // relative to the pump frequency, symmetric about 0
  std::vector<double> s_raw;
  std::vector<double> s;      // s_raw / max|s_raw| when normalized
  bool normalized = false;
  double resolution = 0.0;    // 2 pi / span

  std::size_t bin_of(double w) const;
};

// S(omega) = 2 Re int_0^T dtau exp(-i omega tau) g1(tau), trapezoidal rule,
// evaluated on omega_j = 2 pi j / T.
SpectrumResult spectrum_from_g1(const CorrelationSeries& c, const SpectrumOptions& opt = {});

enum class FeatureKind { peak, dip };

struct Feature {
  FeatureKind kind = FeatureKind::peak;
  double omega = 0.0;       // sub-bin interpolated
  double value = 0.0;       // normalized spectrum value at the extremum
  double width = 0.0;       // full width at half prominence
  double prominence = 0.0;  // relative to max|s|
};

struct FeatureOptions {
  double min_prominence = 1e-3;  // relative to max|s|
  // Restrict the search to omega in [omega_min, omega_max].
  double omega_min = -1e300;
  double omega_max = 1e300;
  // Measure prominence against the largest |s| inside the search window
  // instead of the whole spectrum.
  bool window_relative = false;
};

std::vector<Feature> locate_features(const SpectrumResult& s, const FeatureOptions& opt = {});

}  // namespace cavsim
