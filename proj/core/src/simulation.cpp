#include "cavsim/simulation.hpp"

#include "cavsim/model.hpp"

namespace cavsim {

RunResult simulate(const Config& c) {
  const SystemParams& p = c.system;
  RunResult r;
  r.layout = layout_for(p, c.engine);
  const std::vector<double> s0 = init_state(p, r.layout);
  Trajectory& tr = r.trajectory;
  const IntegrationResult res = integrate(
      make_rhs(p, r.layout), s0, 0.0, p.t_final, c.integrator,
      [&tr](double t, std::span<const double> s, bool flagged) {
        tr.times.push_back(t);
        tr.samples.emplace_back(s.begin(), s.end());
        tr.flags.push_back(flagged ? 1 : 0);
      },
      physicality_check(r.layout));
  r.final_state = res.final_state;
  r.flagged_steps = res.flagged_steps;
  r.observables = observe_trajectory(r.layout, tr.times, tr.samples);
  r.averages = time_average(r.observables, p.avg_window);
  r.mean_positions = average_positions(r.layout, tr.times, tr.samples, p.avg_window);
  return r;
}

RunSummary simulate_summary(const Config& c) {
  const SystemParams& p = c.system;
  const StateLayout layout = layout_for(p, c.engine);
  const std::vector<double> s0 = init_state(p, layout);
  RunSummary out;
  out.initial = observe(layout, s0);

  WindowAverager avg(p.t_final, p.avg_window);
  const auto n = static_cast<std::size_t>(p.n_atoms);
  PositionsSnapshot pos{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const IntegrationResult res = integrate(
      make_rhs(p, layout), s0, 0.0, p.t_final, c.integrator,
      [&](double t, std::span<const double> s, bool) {
        const std::size_t before = avg.count();
        avg.add(t, observe(layout, s));
        if (avg.count() == before) return;
        const ConstStateRef st(layout, s);
        for (std::size_t m = 0; m < n; ++m) {
          pos.x[m] += st.x()[m];
          pos.y[m] += st.y()[m];
        }
      },
      physicality_check(layout));
  out.averages = avg.mean();
  const double inv = 1.0 / static_cast<double>(avg.count());
  for (std::size_t m = 0; m < n; ++m) {
    pos.x[m] *= inv;
    pos.y[m] *= inv;
  }
  out.mean_positions = std::move(pos);
  out.final_state = res.final_state;
  return out;
}

}  // namespace cavsim
