#include "cavsim/scan.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "cavsim/error.hpp"
#include "cavsim/simulation.hpp"

namespace cavsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void set_param(SystemParams& p, ScanParam which, double v) {
  switch (which) {
    case ScanParam::delta_c: p.delta_c = v; break;
    case ScanParam::omega_pump: p.omega_pump = v; break;
    case ScanParam::g: p.g = v; break;
  }
}

ScanCell run_cell(const ScanSpec& spec, int i1, int i2) {
  ScanCell cell;
  cell.i1 = i1;
  cell.i2 = i2;
  cell.param1 = spec.axis1.value(i1);
  cell.param2 = spec.axis2.value(i2);
  cell.seed = cell_seed(spec, cell.param1, cell.param2, 0);
  try {
    ObservableRecord sum;
    PositionsSnapshot pos;
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      const Config c = cell_config(spec, i1, i2, rep);
      const RunSummary r = simulate_summary(c);
      sum.theta += r.averages.theta;
      sum.abs_theta += r.averages.abs_theta;
      sum.e_kin += r.averages.e_kin;
      sum.n_phot += r.averages.n_phot;
      sum.inversion += r.averages.inversion;
      if (r.averages.n_phot_b) sum.n_phot_b = sum.n_phot_b.value_or(0.0) + *r.averages.n_phot_b;
      if (rep == 0) pos = r.mean_positions;
    }
    const double inv = 1.0 / spec.repetitions;
    cell.obs.theta = sum.theta * inv;
    cell.obs.abs_theta = sum.abs_theta * inv;
    cell.obs.e_kin = sum.e_kin * inv;
    cell.obs.n_phot = sum.n_phot * inv;
    cell.obs.inversion = sum.inversion * inv;
    if (sum.n_phot_b) cell.obs.n_phot_b = *sum.n_phot_b * inv;

    const Config c0 = cell_config(spec, i1, i2, 0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      cell.delta = effective_detuning(c0.system, pos);
    } catch (const SingularityError&) {
      cell.delta = nan;
    }
    try {
      cell.threshold_margin = threshold_margin(c0.system, pos);
    } catch (const SingularityError&) {
      cell.threshold_margin = nan;
    }
  } catch (const PhysicalityError& e) {
    cell.ok = false;
    cell.failure = std::string("physicality: ") + e.what();
  } catch (const IntegrationError& e) {
    cell.ok = false;
    cell.failure = std::string("integration: ") + e.what();
  } catch (const Error& e) {
    cell.ok = false;
    cell.failure = std::string("error: ") + e.what();
  }
  return cell;
}

}  // namespace

std::string to_string(ScanParam p) {
  switch (p) {
    case ScanParam::delta_c: return "delta_c";
    case ScanParam::omega_pump: return "omega_pump";
    case ScanParam::g: return "g";
  }
  return "?";
}

ScanParam scan_param_from_string(const std::string& s) {
  if (s == "delta_c") return ScanParam::delta_c;
  if (s == "omega_pump") return ScanParam::omega_pump;
  if (s == "g") return ScanParam::g;
  throw ConfigError("unknown scan parameter '" + s + "' (expected delta_c, omega_pump or g)");
}

std::string to_string(SeedPolicy s) { return s == SeedPolicy::fixed ? "fixed" : "cell_keyed"; }

SeedPolicy seed_policy_from_string(const std::string& s) {
  if (s == "fixed") return SeedPolicy::fixed;
  if (s == "cell_keyed") return SeedPolicy::cell_keyed;
  throw ConfigError("unknown seed policy '" + s + "' (expected fixed or cell_keyed)");
}

double ScanAxis::value(int i) const {
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void validate(const ScanSpec& s) {
  for (const ScanAxis* a : {&s.axis1, &s.axis2}) {
    if (a->count < 2) throw ConfigError("scan axes need at least 2 points");
    if (!std::isfinite(a->min) || !std::isfinite(a->max)) {
      throw ConfigError("scan axis bounds must be finite");
    }
  }
  if (s.axis1.param == s.axis2.param) throw ConfigError("scan axes must name distinct parameters");
  if (s.repetitions < 1) throw ConfigError("repetitions must be >= 1");
}

const ScanCell& ScanGrid::at(int i1, int i2) const {
  return cells.at(static_cast<std::size_t>(i1) * spec.axis2.count + i2);
}

std::uint64_t cell_seed(const ScanSpec& s, double param1, double param2, int repetition) {
  const std::uint64_t base = s.base.system.seed;
  std::uint64_t seed = base;
  if (s.seeds == SeedPolicy::cell_keyed) {
    seed = splitmix64(base ^ splitmix64(std::bit_cast<std::uint64_t>(param1) ^
                                        splitmix64(std::bit_cast<std::uint64_t>(param2))));
  }
  if (repetition > 0) seed = splitmix64(seed + static_cast<std::uint64_t>(repetition));
  return seed;
}

Config cell_config(const ScanSpec& s, int i1, int i2, int repetition) {
  Config c = s.base;
  const double v1 = s.axis1.value(i1);
  const double v2 = s.axis2.value(i2);
  set_param(c.system, s.axis1.param, v1);
  set_param(c.system, s.axis2.param, v2);
  c.system.seed = cell_seed(s, v1, v2, repetition);
  validate(c.system);
  return c;
}

ScanGrid run_scan(const ScanSpec& spec, int workers, std::span<const std::size_t> order) {
  validate(spec);
  validate(spec.base.system);
  const std::size_t n_cells =
      static_cast<std::size_t>(spec.axis1.count) * static_cast<std::size_t>(spec.axis2.count);
  std::vector<std::size_t> schedule(order.begin(), order.end());
  if (schedule.empty()) {
    schedule.resize(n_cells);
    std::iota(schedule.begin(), schedule.end(), std::size_t{0});
  }
  {
    std::vector<char> seen(n_cells, 0);
    for (std::size_t k : schedule) {
      if (k >= n_cells || seen[k]) throw ConfigError("cell order must list every cell once");
      seen[k] = 1;
    }
    if (schedule.size() != n_cells) throw ConfigError("cell order must list every cell once");
  }

  ScanGrid grid;
  grid.spec = spec;
  grid.cells.resize(n_cells);

  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n_cells));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n_cells) return;
      const std::size_t cell = schedule[k];
      const int i1 = static_cast<int>(cell / spec.axis2.count);
      const int i2 = static_cast<int>(cell % spec.axis2.count);
      grid.cells[cell] = run_cell(spec, i1, i2);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return grid;
}

}  // namespace cavsim
