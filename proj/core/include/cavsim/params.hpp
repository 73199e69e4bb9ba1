#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace cavsim {

// Lengths are measured in units of the atomic wavelength, so the common
// wavenumber of cavity, pump and atomic transition is 2*pi.
inline constexpr double kWavenumber = 2.0 * std::numbers::pi;

// Rates and frequencies are in units of the spontaneous emission rate Gamma,
// lengths in lambda, momenta in hbar*k, energies in hbar*omega_r.
struct SystemParams {
  int n_atoms = 1;
  double g = 0.0;
  double kappa = 1.0;
  double gamma = 1.0;
  double omega_pump = 0.0;
  double delta_a = 0.0;
  double delta_c = 0.0;
  std::optional<double> delta_c2;  // filter mode enabled when set
  double waist = 1.0;
  double omega_r = 1.0;
  std::uint64_t seed = 0;
  double t_final = 100.0;
  double avg_window = 30.0;
  double init_pos_halfwidth = 2.0;
  double init_mom_halfwidth = 3.0;
  double init_n_phot = 0.0;
  bool pin_atoms = false;

  bool two_mode() const { return delta_c2.has_value(); }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct PositionsSnapshot {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
};

// Throws ConfigError on the first violated invariant.
void validate(const SystemParams& p);

// Cavity detuning shifted by the dispersive atomic contribution,
// Delta_c - sum_i g(x_i, y_i)^2 / Delta_a.
double effective_detuning(const SystemParams& p, const PositionsSnapshot& pos);

// Pump strength above the self-organization threshold, as LHS - RHS of
// 2 sqrt(N) g' Omega / |Delta_a| > ((kappa/2)^2 + delta^2) / (2 |delta|).
// Positive means ordering is predicted.
double threshold_margin(const SystemParams& p, const PositionsSnapshot& pos);

}  // namespace cavsim
