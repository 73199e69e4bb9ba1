#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <span>
#include <vector>

#include "cavsim/error.hpp"

namespace cavsim {

struct IntegratorSettings {
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  double max_step = 0.5;
  double sample_dt = 0.1;
  // Accepted steps shorter than this abort the run as too stiff.
  double min_step = 1e-10;

  friend bool operator==(const IntegratorSettings&, const IntegratorSettings&) = default;
};

void validate(const IntegratorSettings& s);

using RhsFn = std::function<void(double t, std::span<const double> s, std::span<double> ds)>;
// Called once per sample point, in time order.
// `flagged` reports whether any step since the previous sample was flagged.
using SampleFn = std::function<void(double t, std::span<const double> s, bool flagged)>;
// Called on every accepted step. Returns true to flag a tolerated anomaly;
// throws to abort (e.g. PhysicalityError).
using StepCheckFn = std::function<bool(double t, std::span<const double> s)>;

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> samples;
  // Nonzero where some accepted step since the previous sample was flagged
  // by the step check.
  std::vector<std::uint8_t> flags;
};

struct IntegrationResult {
  std::vector<double> final_state;  // at exactly t0 + span
  std::size_t accepted_steps = 0;
  std::size_t samples = 0;
  std::size_t flagged_steps = 0;
};

// Thrown on step-size underflow; carries the last accepted state.
class StepUnderflowError : public IntegrationError {
 public:
  StepUnderflowError(const std::string& what, double t, std::vector<double> state)
      : IntegrationError(what), time(t), last_state(std::move(state)) {}
  double time;
  std::vector<double> last_state;
};

// Adaptive Dormand-Prince 5(4) with dense output. Samples are produced on
// t0 + i * sample_dt for every i with that time <= t0 + span, by
// interpolation inside accepted steps only.
IntegrationResult integrate(const RhsFn& rhs, std::span<const double> s0, double t0, double span,
                            const IntegratorSettings& set, const SampleFn& on_sample,
                            const StepCheckFn& check = {});

// Convenience wrapper that stores every sample.
Trajectory integrate(const RhsFn& rhs, std::span<const double> s0, double span,
                     const IntegratorSettings& set, const StepCheckFn& check = {});

}  // namespace cavsim
