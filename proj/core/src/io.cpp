#include "cavsim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "cavsim/error.hpp"
#include "cavsim/version.hpp"

namespace cavsim::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f.precision(17);
  return f;
}

void close_checked(std::ofstream& f, const std::filesystem::path& path) {
  f.close();
  if (!f) throw Error("write to '" + path.string() + "' failed");
}

double field_of(const ScanCell& c, const std::string& field) {
  if (!c.ok) return std::numeric_limits<double>::quiet_NaN();
  if (field == "abs_theta") return c.obs.abs_theta;
  if (field == "theta") return c.obs.theta;
  if (field == "n_phot") return c.obs.n_phot;
  if (field == "e_kin") return c.obs.e_kin;
  if (field == "inversion") return c.obs.inversion;
  if (field == "delta") return c.delta;
  if (field == "threshold_margin") return c.threshold_margin;
  if (field == "n_phot_b") {
    return c.obs.n_phot_b ? *c.obs.n_phot_b : std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError("unknown scan field '" + field + "'");
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_trajectory_csv(const std::filesystem::path& path, const RunResult& run) {
  auto f = open_out(path);
  const bool two = run.layout.two_mode;
  f << "t,flag";
  for (const auto& name : run.layout.column_names()) f << ',' << name;
  f << ",obs_theta,obs_abs_theta,obs_e_kin,obs_n_phot,obs_inversion";
  if (two) f << ",obs_n_phot_b";
  f << '\n';
  const auto& tr = run.trajectory;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    f << format_double(tr.times[i]) << ',' << int(tr.flags[i]);
    for (double v : tr.samples[i]) f << ',' << format_double(v);
    const ObservableRecord& o = run.observables.records[i];
    f << ',' << format_double(o.theta) << ',' << format_double(o.abs_theta) << ','
      << format_double(o.e_kin) << ',' << format_double(o.n_phot) << ','
      << format_double(o.inversion);
    if (two) f << ',' << format_double(o.n_phot_b.value_or(0.0));
    f << '\n';
  }
  close_checked(f, path);
}

void write_scan_csv(const std::filesystem::path& path, const ScanGrid& grid) {
  auto f = open_out(path);
  f << to_string(grid.spec.axis1.param) << ',' << to_string(grid.spec.axis2.param)
    << ",abs_theta,theta,n_phot,e_kin,inversion,delta,threshold_margin,seed,status\n";
  for (const ScanCell& c : grid.cells) {
    f << format_double(c.param1) << ',' << format_double(c.param2);
    for (const char* k : {"abs_theta", "theta", "n_phot", "e_kin", "inversion", "delta",
                          "threshold_margin"}) {
      f << ',' << format_double(field_of(c, k));
    }
    f << ',' << c.seed << ',' << (c.ok ? std::string("ok") : c.failure.substr(0, c.failure.find(':')))
      << '\n';
  }
  close_checked(f, path);
}

void write_scan_heatmap(const std::filesystem::path& path, const ScanGrid& grid,
                        const std::string& field, double ekin_cap) {
  auto f = open_out(path);
  const ScanAxis& a1 = grid.spec.axis1;
  const ScanAxis& a2 = grid.spec.axis2;
  f << to_string(a1.param) << '\\' << to_string(a2.param);
  for (int j = 0; j < a2.count; ++j) f << ',' << format_double(a2.value(j));
  f << '\n';
  for (int i = 0; i < a1.count; ++i) {
    f << format_double(a1.value(i));
    for (int j = 0; j < a2.count; ++j) {
      double v = field_of(grid.at(i, j), field);
      if (field == "e_kin" && ekin_cap > 0.0 && v > ekin_cap) v = ekin_cap;
      f << ',' << format_double(v);
    }
    f << '\n';
  }
  close_checked(f, path);
}

void write_correlation_csv(const std::filesystem::path& path, const CorrelationSeries& c) {
  auto f = open_out(path);
  f << "tau,g1_re,g1_im\n";
  for (std::size_t i = 0; i < c.tau.size(); ++i) {
    f << format_double(c.tau[i]) << ',' << format_double(c.g1[i].real()) << ','
      << format_double(c.g1[i].imag()) << '\n';
  }
  close_checked(f, path);
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumResult& s) {
  auto f = open_out(path);
  f << "omega,s_normalized,s_raw\n";
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    f << format_double(s.omega[i]) << ',' << format_double(s.s[i]) << ','
      << format_double(s.s_raw[i]) << '\n';
  }
  close_checked(f, path);
}

nlohmann::json features_to_json(const std::vector<Feature>& features) {
  nlohmann::json out = nlohmann::json::array();
  for (const Feature& ft : features) {
    out.push_back({{"kind", ft.kind == FeatureKind::peak ? "peak" : "dip"},
                   {"omega", ft.omega},
                   {"value", ft.value},
                   {"width", ft.width},
                   {"prominence", ft.prominence}});
  }
  return out;
}

nlohmann::json report_to_json(const oracle::ComparisonReport& r) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : r.variables) {
    vars.push_back({{"name", v.name},
                    {"max_abs_error", v.max_abs_error},
                    {"max_rel_error", v.max_rel_error},
                    {"gated", v.gated},
                    {"pass", v.pass}});
  }
  return {{"pass", r.pass}, {"gated_score", r.gated_score}, {"variables", vars}};
}

nlohmann::json scan_spec_to_json(const ScanSpec& s) {
  auto axis = [](const ScanAxis& a) {
    return nlohmann::json{{"param", to_string(a.param)}, {"min", a.min}, {"max", a.max},
                          {"count", a.count}};
  };
  return {{"axis1", axis(s.axis1)},
          {"axis2", axis(s.axis2)},
          {"seeds", to_string(s.seeds)},
          {"repetitions", s.repetitions}};
}

nlohmann::json metadata(const std::string& command, const Config& c, const nlohmann::json& extra) {
  nlohmann::json j = {{"tool", "cavsim"},
                      {"version", kVersion},
                      {"command", command},
                      {"config", to_json(c)}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
  close_checked(f, path);
}

}  // namespace cavsim::io
