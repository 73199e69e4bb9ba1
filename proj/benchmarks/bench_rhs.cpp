#include <benchmark/benchmark.h>

#include <vector>

#include "cavsim/config.hpp"
#include "cavsim/model.hpp"
#include "cavsim/simulation.hpp"

using namespace cavsim;

namespace {

SystemParams desk(int n) {
  SystemParams p;
  p.n_atoms = n;
  p.g = 1.0;
  p.kappa = 10.0;
  p.omega_pump = 5.0;
  p.delta_a = -20.0;
  p.delta_c = -10.0;
  p.waist = 1000.0;
  p.seed = 3;
  return p;
}

void rhs_bench(benchmark::State& st, Closure closure, bool two_mode) {
  SystemParams p = desk(static_cast<int>(st.range(0)));
  if (two_mode) p.delta_c2 = -20.0;
  const StateLayout l = layout_for(p, closure);
  std::vector<double> s = init_state(p, l);
  // Nonzero moments so no branch is skipped.
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += 1e-3 * static_cast<double>(i % 7);
  std::vector<double> ds(l.size);
  for (auto _ : st) {
    rhs(p, l, s, ds);
    benchmark::DoNotOptimize(ds.data());
  }
  st.counters["state_size"] = static_cast<double>(l.size);
}

void BM_RhsSecondOrder(benchmark::State& st) { rhs_bench(st, Closure::second_order, false); }
void BM_RhsTwoMode(benchmark::State& st) { rhs_bench(st, Closure::second_order, true); }
void BM_RhsMeanField(benchmark::State& st) { rhs_bench(st, Closure::mean_field, false); }

void BM_TrajectoryMeanField(benchmark::State& st) {
  Config c;
  c.system = desk(static_cast<int>(st.range(0)));
  c.system.t_final = 20.0;
  c.system.avg_window = 10.0;
  c.engine = Closure::mean_field;
  for (auto _ : st) benchmark::DoNotOptimize(simulate_summary(c).averages.abs_theta);
}

}  // namespace

BENCHMARK(BM_RhsSecondOrder)->Arg(20)->Arg(40)->Arg(100);
BENCHMARK(BM_RhsTwoMode)->Arg(20)->Arg(40);
BENCHMARK(BM_RhsMeanField)->Arg(20)->Arg(100)->Arg(1000);
BENCHMARK(BM_TrajectoryMeanField)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
