#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cavsim/config.hpp"
#include "cavsim/observables.hpp"

namespace cavsim {

enum class ScanParam { delta_c, omega_pump, g };

std::string to_string(ScanParam p);
ScanParam scan_param_from_string(const std::string& s);

struct ScanAxis {
  ScanParam param = ScanParam::delta_c;
  double min = 0.0;
  double max = 1.0;
  int count = 2;

  // min + (max - min) * i / (count - 1); a 2x refined axis (2 count - 1
  // points) reproduces these values bit for bit at even indices.
  double value(int i) const;
};

enum class SeedPolicy {
  fixed,       // every cell uses the base seed
  cell_keyed,  // base seed mixed with the cell's parameter values
};

std::string to_string(SeedPolicy s);
SeedPolicy seed_policy_from_string(const std::string& s);

struct ScanSpec {
  ScanAxis axis1;
  ScanAxis axis2;
  Config base;  // base.engine selects the closure
  SeedPolicy seeds = SeedPolicy::cell_keyed;
  int repetitions = 1;  // independent seeds averaged per cell
};

void validate(const ScanSpec& s);

struct ScanCell {
  int i1 = 0;
  int i2 = 0;
  double param1 = 0.0;
  double param2 = 0.0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string failure;  // reason code: physicality | integration | error
  ObservableRecord obs;
  double delta = 0.0;             // effective detuning at the time-averaged positions
  double threshold_margin = 0.0;  // NaN where the threshold is undefined
};

struct ScanGrid {
  ScanSpec spec;
  std::vector<ScanCell> cells;  // row-major: index = i1 * axis2.count + i2

  const ScanCell& at(int i1, int i2) const;
};

std::uint64_t cell_seed(const ScanSpec& s, double param1, double param2, int repetition);

// Config of a single cell (parameters substituted, seed resolved).
Config cell_config(const ScanSpec& s, int i1, int i2, int repetition);

// Runs every cell on `workers` threads (0: hardware concurrency). `order`
// optionally fixes the submission order of the flat cell indices; the grid
// does not depend on it.
ScanGrid run_scan(const ScanSpec& spec, int workers = 1, std::span<const std::size_t> order = {});

}  // namespace cavsim
