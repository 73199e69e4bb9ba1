#pragma once

#include <span>
#include <vector>

#include "cavsim/integrator.hpp"
#include "cavsim/layout.hpp"
#include "cavsim/params.hpp"

namespace cavsim {

// Tolerance on n_phot >= 0 and pop in [0, 1] before a state counts as unphysical.
inline constexpr double kPhysicalityTolerance = 1e-6;

// Main (cosine) mode coupling g cos(kx) exp(-y^2/w0^2).
double coupling(const SystemParams& p, double x, double y);

// Filter (sine) mode coupling g sin(kx) exp(-y^2/w0^2).
double filter_coupling(const SystemParams& p, double x, double y);

// Standing-wave drive Omega cos(ky).
double pump_amplitude(const SystemParams& p, double y);

StateLayout layout_for(const SystemParams& p, Closure closure);

// Time derivative of the closed second-order moment set with semiclassical
// forces. Requires a single-mode second-order layout.
void rhs_second_order(const SystemParams& p, const StateLayout& layout,
                      std::span<const double> s, std::span<double> ds);

// Same set extended by the filter mode b: <b>, <b+b>, <b sigma+_m>, <a+b>.
// Requires a two-mode second-order layout and p.delta_c2.
void rhs_two_mode(const SystemParams& p, const StateLayout& layout, std::span<const double> s,
                  std::span<double> ds);

// First-order (mean-field) reduction: every second moment factorized, while
// the excited population stays dynamical. Supports the filter mode as well.
void rhs_mean_field(const SystemParams& p, const StateLayout& layout, std::span<const double> s,
                    std::span<double> ds);

// Dispatches on the layout's closure and mode count.
void rhs(const SystemParams& p, const StateLayout& layout, std::span<const double> s,
         std::span<double> ds);

// Seeded initial condition: ground-state atoms, vacuum field (plus an optional
// incoherent photon number), uniform positions in [-h, h]^2 and momenta in
// [-m, m]^2. Identical seeds give bit-identical states.
std::vector<double> init_state(const SystemParams& p, const StateLayout& layout);

// Throws PhysicalityError if the state is non-finite or n_phot / pop leave
// their physical range by more than tol. Returns true for smaller excursions.
bool check_physical(const StateLayout& layout, std::span<const double> s,
                    double tol = kPhysicalityTolerance);

// Integrator adapters. The step check applies check_physical to the leading
// layout.size components, so augmented states are accepted.
RhsFn make_rhs(const SystemParams& p, const StateLayout& layout);
StepCheckFn physicality_check(const StateLayout& layout, double tol = kPhysicalityTolerance);

PositionsSnapshot positions_of(const StateLayout& layout, std::span<const double> s);

}  // namespace cavsim
