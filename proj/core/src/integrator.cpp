#include "cavsim/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace cavsim {

namespace odeint = boost::numeric::odeint;

namespace {

using Vec = std::vector<double>;

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void validate(const IntegratorSettings& s) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(s.rel_tol) || !positive(s.abs_tol) || !positive(s.max_step) ||
      !positive(s.sample_dt) || !positive(s.min_step)) {
    throw ConfigError("integrator tolerances and step sizes must be positive and finite");
  }
  if (s.sample_dt < s.min_step) throw ConfigError("sample_dt is below the minimum step");
}

IntegrationResult integrate(const RhsFn& rhs, std::span<const double> s0, double t0, double span,
                            const IntegratorSettings& set, const SampleFn& on_sample,
                            const StepCheckFn& check) {
  validate(set);
  if (!(span > 0.0) || !std::isfinite(span)) throw IntegrationError("integration span must be > 0");
  Vec x(s0.begin(), s0.end());
  if (!all_finite(x)) throw IntegrationError("initial state is not finite");

  auto system = [&rhs](const Vec& s, Vec& ds, double t) { rhs(t, s, ds); };
  auto stepper = odeint::make_dense_output(set.abs_tol, set.rel_tol, set.max_step,
                                           odeint::runge_kutta_dopri5<Vec>());

  const double t_end = t0 + span;
  const auto n_samples =
      static_cast<std::size_t>(std::floor(span / set.sample_dt * (1.0 + 1e-12))) + 1;

  IntegrationResult result;
  bool flagged = check ? check(t0, x) : false;
  if (on_sample) on_sample(t0, x, flagged);
  flagged = false;
  std::size_t next = 1;
  Vec buf(x.size());

  stepper.initialize(x, t0, std::min(set.max_step, 1e-3));
  while (stepper.current_time() < t_end) {
    try {
      stepper.do_step(system);
    } catch (const odeint::step_adjustment_error& e) {
      throw StepUnderflowError(std::string("step size control failed: ") + e.what(),
                               stepper.current_time(), stepper.current_state());
    }
    ++result.accepted_steps;
    const double t = stepper.current_time();
    const Vec& cur = stepper.current_state();
    if (!all_finite(cur)) {
      throw IntegrationError("state became non-finite at t = " + std::to_string(t));
    }
    const double taken = t - stepper.previous_time();
    if (taken < set.min_step && t < t_end) {
      throw StepUnderflowError("step size underflow (stiff system?) at t = " + std::to_string(t),
                               stepper.previous_time(), Vec(stepper.previous_state()));
    }
    if (check && check(t, cur)) {
      flagged = true;
      ++result.flagged_steps;
    }
    while (next < n_samples) {
      const double ts = t0 + static_cast<double>(next) * set.sample_dt;
      if (ts > t) break;
      stepper.calc_state(ts, buf);
      if (on_sample) on_sample(ts, buf, flagged);
      flagged = false;
      ++next;
    }
  }
  stepper.calc_state(t_end, buf);
  result.final_state = std::move(buf);
  result.samples = next;
  return result;
}

Trajectory integrate(const RhsFn& rhs, std::span<const double> s0, double span,
                     const IntegratorSettings& set, const StepCheckFn& check) {
  Trajectory tr;
  integrate(
      rhs, s0, 0.0, span, set,
      [&tr](double t, std::span<const double> s, bool flagged) {
        tr.times.push_back(t);
        tr.samples.emplace_back(s.begin(), s.end());
        tr.flags.push_back(flagged ? 1 : 0);
      },
      check);
  return tr;
}

}  // namespace cavsim
