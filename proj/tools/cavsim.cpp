#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavsim/config.hpp"
#include "cavsim/error.hpp"
#include "cavsim/io.hpp"
#include "cavsim/model.hpp"
#include "cavsim/oracle.hpp"
#include "cavsim/scan.hpp"
#include "cavsim/simulation.hpp"
#include "cavsim/spectrum.hpp"
#include "cavsim/version.hpp"

namespace fs = std::filesystem;
using namespace cavsim;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kPhysicality = 2,
  kIntegration = 3,
  kNonStationary = 4,
  kValidationMismatch = 5,
};

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out = ".";
  bool force = false;
  int verbosity = 0;
  bool quiet = false;
};

struct ScanArgs {
  std::string axis1;
  std::string axis2;
  std::string engine = "mean_field";
  std::string seeds = "cell_keyed";
  int repetitions = 1;
  int workers = 0;
  double ekin_cap = 10.0;
};

struct SpectrumArgs {
  std::string mode = "main";
  double span = 200.0;
  double dtau = 0.02;
  int repetitions = 1;
  double spacing = 10.0;
  double apodization = 0.1;
  double min_prominence = 1e-3;
  double omega_min = -1e300;
  double omega_max = 1e300;
  bool window_relative = false;
  bool strict = false;
};

struct ValidateArgs {
  int cutoff = 10;
  bool no_cutoff_check = false;
  double rel = 0.05;
  double abs_floor = 1e-4;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config, "Configuration file (JSON)")->required();
  sub->add_option("-s,--set", c.overrides, "Override a configuration key, key=value (repeatable, last wins)")
      ->type_name("KEY=VALUE");
  sub->add_option("-o,--out", c.out, "Output directory, created if absent")->capture_default_str();
  sub->add_flag("-f,--force", c.force, "Overwrite existing output files");
  sub->add_flag("-v,--verbose", c.verbosity, "More progress output (repeatable)");
  sub->add_flag("-q,--quiet", c.quiet, "Only errors on standard error");
}

// Loads and validates before anything touches the file system, so a bad
// invocation leaves no partial outputs behind.
Config resolve(const Common& c) { return apply_overrides(load_config_file(c.config), c.overrides); }

fs::path prepare_out(const Common& c, const std::vector<std::string>& files) {
  const fs::path dir(c.out);
  if (!c.force) {
    for (const auto& f : files) {
      if (fs::exists(dir / f)) {
        throw ConfigError("refusing to overwrite '" + (dir / f).string() + "' (use --force)");
      }
    }
  }
  fs::create_directories(dir);
  return dir;
}

ScanAxis parse_axis(const std::string& text) {
  // param:min:max:count
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 4) throw ConfigError("axis '" + text + "' is not of the form param:min:max:count");
  ScanAxis a;
  a.param = scan_param_from_string(parts[0]);
  try {
    std::size_t used = 0;
    a.min = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("min");
    a.max = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("max");
    a.count = std::stoi(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument("count");
  } catch (const std::logic_error&) {
    throw ConfigError("axis '" + text + "' has a malformed number");
  }
  return a;
}

int default_workers() {
  if (const char* env = std::getenv("CAVSIM_WORKERS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::logic_error&) {
      throw ConfigError(std::string("CAVSIM_WORKERS='") + env + "' is not an integer");
    }
  }
  return 0;
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

int cmd_run(const Common& com, const std::string& cmd) {
  const Config c = resolve(com);
  const fs::path dir = prepare_out(com, {"trajectory.csv", "observables.json", "metadata.json"});
  if (com.verbosity > 0) std::cerr << "integrating to t = " << c.system.t_final << "\n";
  const RunResult run = simulate(c);
  io::write_trajectory_csv(dir / "trajectory.csv", run);

  const ObservableRecord& last = run.observables.records.back();
  auto record = [](const ObservableRecord& r) {
    nlohmann::json j = {{"theta", r.theta},         {"abs_theta", r.abs_theta}, {"e_kin", r.e_kin},
                        {"n_phot", r.n_phot},       {"inversion", r.inversion}};
    if (r.n_phot_b) j["n_phot_b"] = *r.n_phot_b;
    return j;
  };
  io::write_json(dir / "observables.json", {{"final", record(last)},
                                             {"time_average", record(run.averages)},
                                             {"avg_window", c.system.avg_window},
                                             {"flagged_steps", run.flagged_steps}});
  io::write_json(dir / "metadata.json", io::metadata(cmd, c, {{"subcommand", "run"}}));
  if (!com.quiet) {
    std::printf("t=%s |Theta|=%.6g n_phot=%.6g e_kin=%.6g (window averages: |Theta|=%.6g n_phot=%.6g e_kin=%.6g)\n",
                io::format_double(run.trajectory.times.back()).c_str(), last.abs_theta, last.n_phot,
                last.e_kin, run.averages.abs_theta, run.averages.n_phot, run.averages.e_kin);
  }
  return kOk;
}

int cmd_scan(const Common& com, const ScanArgs& a, const std::string& cmd) {
  ScanSpec spec;
  spec.base = resolve(com);
  spec.base.engine = closure_from_string(a.engine);
  spec.axis1 = parse_axis(a.axis1);
  spec.axis2 = parse_axis(a.axis2);
  spec.seeds = seed_policy_from_string(a.seeds);
  spec.repetitions = a.repetitions;
  validate(spec);
  const std::vector<std::string> heatmaps = {"abs_theta", "n_phot", "e_kin", "delta", "threshold_margin"};
  std::vector<std::string> files = {"scan.csv", "metadata.json"};
  for (const auto& h : heatmaps) files.push_back("heatmap_" + h + ".csv");
  const fs::path dir = prepare_out(com, files);

  if (com.verbosity > 0) {
    std::cerr << "scanning " << spec.axis1.count << " x " << spec.axis2.count << " cells\n";
  }
  const ScanGrid grid = run_scan(spec, a.workers);
  io::write_scan_csv(dir / "scan.csv", grid);
  for (const auto& h : heatmaps) {
    io::write_scan_heatmap(dir / ("heatmap_" + h + ".csv"), grid, h, a.ekin_cap);
  }
  nlohmann::json seeds = nlohmann::json::array();
  int failed = 0;
  for (const ScanCell& cell : grid.cells) {
    seeds.push_back(cell.seed);
    if (!cell.ok) {
      ++failed;
      if (!com.quiet) {
        std::cerr << "cell (" << cell.i1 << ", " << cell.i2 << ") failed: " << cell.failure << "\n";
      }
    }
  }
  io::write_json(dir / "metadata.json",
                 io::metadata(cmd, spec.base,
                              {{"subcommand", "scan"},
                               {"scan", io::scan_spec_to_json(spec)},
                               {"cell_seeds", seeds},
                               {"failed_cells", failed}}));
  if (!com.quiet) {
    std::printf("%zu cells, %d failed\n", grid.cells.size(), failed);
  }
  return kOk;
}

int cmd_spectrum(const Common& com, const SpectrumArgs& a, const std::string& cmd) {
  const Config c = resolve(com);
  if (c.engine != Closure::second_order) {
    throw ConfigError("spectra need the second_order engine");
  }
  CorrelationSettings cs;
  cs.mode = mode_tag_from_string(a.mode);
  cs.span = a.span;
  cs.dtau = a.dtau;
  cs.repetitions = a.repetitions;
  cs.repetition_spacing = a.spacing;
  if (cs.mode == ModeTag::filter && !c.system.delta_c2) {
    throw ConfigError("filter spectrum needs delta_c2 in the configuration");
  }
  const fs::path dir = prepare_out(com, {"g1.csv", "spectrum.csv", "features.json", "metadata.json"});

  if (com.verbosity > 0) std::cerr << "integrating to t0 = " << c.system.t_final << "\n";
  const RunSummary run = simulate_summary(c);
  const StateLayout l = layout_for(c.system, c.engine);
  const CorrelationSeries g1 =
      correlation_function(c.system, l, run.final_state, c.system.t_final, cs, c.integrator);
  SpectrumOptions so;
  so.apodization_rate = a.apodization;
  const SpectrumResult s = spectrum_from_g1(g1, so);
  FeatureOptions fo;
  fo.min_prominence = a.min_prominence;
  fo.omega_min = a.omega_min;
  fo.omega_max = a.omega_max;
  fo.window_relative = a.window_relative;
  const auto features = locate_features(s, fo);

  io::write_correlation_csv(dir / "g1.csv", g1);
  io::write_spectrum_csv(dir / "spectrum.csv", s);
  io::write_json(dir / "features.json", {{"mode", to_string(cs.mode)},
                                         {"resolution", s.resolution},
                                         {"photon_drift", g1.photon_drift},
                                         {"stationarity_warning", g1.stationarity_warning},
                                         {"features", io::features_to_json(features)}});
  io::write_json(dir / "metadata.json",
                 io::metadata(cmd, c,
                              {{"subcommand", "spectrum"},
                               {"correlation", {{"mode", to_string(cs.mode)},
                                                {"span", cs.span},
                                                {"dtau", cs.dtau},
                                                {"repetitions", cs.repetitions},
                                                {"repetition_spacing", cs.repetition_spacing}}},
                               {"apodization_rate", a.apodization}}));
  if (!com.quiet) {
    for (const Feature& f : features) {
      std::printf("%s omega=%.4f value=%.4g prominence=%.4g width=%.4g\n",
                  f.kind == FeatureKind::peak ? "peak" : "dip ", f.omega, f.value, f.prominence,
                  f.width);
    }
  }
  if (g1.stationarity_warning) {
    std::cerr << "warning: photon number drifted by " << g1.photon_drift
              << " over the correlation window; the state is not stationary\n";
    if (a.strict) return kNonStationary;
  }
  return kOk;
}

int cmd_validate(const Common& com, const ValidateArgs& a, const std::string& cmd) {
  const Config c = resolve(com);
  oracle::ValidationOptions opt;
  opt.fock_cutoff = a.cutoff;
  opt.check_cutoff = !a.no_cutoff_check;
  opt.tol.rel = a.rel;
  opt.tol.abs_floor = a.abs_floor;
  const fs::path dir = prepare_out(com, {"report.json", "metadata.json"});
  const oracle::ValidationRun run = oracle::validate_config(c, opt);
  nlohmann::json report = io::report_to_json(run.report);
  report["cutoff_sensitivity"] = run.oracle.cutoff_sensitivity;
  report["worst_min_eigenvalue"] = run.oracle.worst.min_eigenvalue;
  io::write_json(dir / "report.json", report);
  io::write_json(dir / "metadata.json",
                 io::metadata(cmd, c,
                              {{"subcommand", "validate"},
                               {"fock_cutoff", a.cutoff},
                               {"check_cutoff", opt.check_cutoff},
                               {"rel", a.rel},
                               {"abs_floor", a.abs_floor}}));
  if (!com.quiet) {
    for (const auto& v : run.report.variables) {
      std::printf("%-12s max_rel=%.3e max_abs=%.3e %s%s\n", v.name.c_str(), v.max_rel_error,
                  v.max_abs_error, v.pass ? "ok" : "MISMATCH", v.gated ? " (gated)" : "");
    }
    std::printf("%s, gated score %.4g\n", run.report.pass ? "pass" : "fail", run.report.gated_score);
  }
  return run.report.pass ? kOk : kValidationMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cumulant simulation of atoms self-organizing in a transversely pumped cavity", "cavsim"};
  app.get_formatter()->column_width(36);
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 1 usage or configuration error, 2 physicality abort,\n"
      "3 integration failure, 4 non-stationary spectrum under --strict,\n"
      "5 validation mismatch.");

  Common com;
  ScanArgs scan;
  SpectrumArgs spec;
  ValidateArgs val;

  auto* run = app.add_subcommand("run", "Integrate one trajectory and write its observables");
  add_common(run, com);

  auto* sc = app.add_subcommand("scan", "Sweep two parameters over a grid of independent runs");
  add_common(sc, com);
  sc->add_option("--axis1", scan.axis1, "First axis, param:min:max:count (param: delta_c, omega_pump, g)")
      ->required();
  sc->add_option("--axis2", scan.axis2, "Second axis, same form as --axis1")->required();
  sc->add_option("--engine", scan.engine, "Moment closure: mean_field or second_order")->capture_default_str();
  sc->add_option("--seeds", scan.seeds, "Seed policy: cell_keyed or fixed")->capture_default_str();
  sc->add_option("--repetitions", scan.repetitions, "Independent seeds averaged per cell")
      ->capture_default_str();
  sc->add_option("-w,--workers", scan.workers,
                 "Worker threads; 0 uses every core (default from CAVSIM_WORKERS)");
  sc->add_option("--ekin-cap", scan.ekin_cap, "Clip e_kin at this value in its heat map; 0 disables")
      ->capture_default_str();

  auto* sp = app.add_subcommand("spectrum", "Run to t_final, then compute g1 and the output spectrum");
  add_common(sp, com);
  sp->add_option("--mode", spec.mode, "Cavity mode: main or filter")->capture_default_str();
  sp->add_option("--span", spec.span, "Correlation window T")->capture_default_str();
  sp->add_option("--dtau", spec.dtau, "Correlation sample step")->capture_default_str();
  sp->add_option("--repetitions", spec.repetitions, "Start times whose g1 is averaged")
      ->capture_default_str();
  sp->add_option("--spacing", spec.spacing, "Time between averaged start times")->capture_default_str();
  sp->add_option("--apodization", spec.apodization, "Exponential window rate applied to g1; 0 disables")
      ->capture_default_str();
  sp->add_option("--min-prominence", spec.min_prominence, "Feature threshold relative to the maximum")
      ->capture_default_str();
  sp->add_option("--omega-min", spec.omega_min, "Lower edge of the feature search window");
  sp->add_option("--omega-max", spec.omega_max, "Upper edge of the feature search window");
  sp->add_flag("--window-relative", spec.window_relative,
               "Measure prominence against the maximum inside the search window");
  sp->add_flag("--strict", spec.strict, "Exit with code 4 when the state is not stationary");

  auto* va = app.add_subcommand("validate", "Compare the cumulant engine with the exact master equation");
  add_common(va, com);
  va->add_option("--cutoff", val.cutoff, "Fock cutoff of the exact model")->capture_default_str();
  va->add_flag("--no-cutoff-check", val.no_cutoff_check, "Skip the cutoff convergence rerun");
  va->add_option("--rel", val.rel, "Relative tolerance")->capture_default_str();
  va->add_option("--abs-floor", val.abs_floor, "Absolute tolerance floor")->capture_default_str();

  try {
    scan.workers = default_workers();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const std::string cmd = command_line(argc, argv);
  try {
    if (*run) return cmd_run(com, cmd);
    if (*sc) return cmd_scan(com, scan, cmd);
    if (*sp) return cmd_spectrum(com, spec, cmd);
    return cmd_validate(com, val, cmd);
  } catch (const PhysicalityError& e) {
    std::cerr << "physicality abort: " << e.what() << "\n";
    return kPhysicality;
  } catch (const IntegrationError& e) {
    std::cerr << "integration failure: " << e.what() << "\n";
    return kIntegration;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
