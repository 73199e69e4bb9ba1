#pragma once

#include <vector>

#include "cavsim/config.hpp"
#include "cavsim/integrator.hpp"
#include "cavsim/layout.hpp"
#include "cavsim/observables.hpp"

namespace cavsim {

struct RunResult {
  StateLayout layout;
  Trajectory trajectory;
  TimeSeries observables;
  ObservableRecord averages;         // over the final avg_window
  PositionsSnapshot mean_positions;  // over the final avg_window
  std::vector<double> final_state;
  std::size_t flagged_steps = 0;
};

// Seeded initial state integrated to t_final with every sample kept.
RunResult simulate(const Config& c);

// Same run, streaming: only window averages are accumulated.
struct RunSummary {
  ObservableRecord averages;
  PositionsSnapshot mean_positions;
  ObservableRecord initial;
  std::vector<double> final_state;
};

RunSummary simulate_summary(const Config& c);

}  // namespace cavsim
