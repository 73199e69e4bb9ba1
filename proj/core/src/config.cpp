#include "cavsim/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "cavsim/error.hpp"

namespace cavsim {

using nlohmann::json;

namespace {

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("key '" + key + "' must be finite");
  return d;
}

struct Field {
  bool mandatory;
  std::function<void(Config&, const json&, const std::string&)> set;
};

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    auto real = [&t](const std::string& key, bool mandatory, double SystemParams::*member) {
      t[key] = {mandatory, [member](Config& c, const json& v, const std::string& k) {
                  c.system.*member = number(v, k);
                }};
    };
    auto numeric = [&t](const std::string& key, double IntegratorSettings::*member) {
      t[key] = {false, [member](Config& c, const json& v, const std::string& k) {
                  c.integrator.*member = number(v, k);
                }};
    };
    t["n_atoms"] = {true, [](Config& c, const json& v, const std::string& k) {
                      if (!v.is_number_integer()) throw ConfigError("key '" + k + "' must be an integer");
                      const auto n = v.get<long long>();
                      if (n < 1 || n > 100000) throw ConfigError("n_atoms must be in [1, 100000]");
                      c.system.n_atoms = static_cast<int>(n);
                    }};
    t["seed"] = {true, [](Config& c, const json& v, const std::string& k) {
                   if (!v.is_number_unsigned()) {
                     throw ConfigError("key '" + k + "' must be a non-negative integer");
                   }
                   c.system.seed = v.get<std::uint64_t>();
                 }};
    real("g", true, &SystemParams::g);
    real("kappa", true, &SystemParams::kappa);
    real("gamma", false, &SystemParams::gamma);
    real("omega_pump", true, &SystemParams::omega_pump);
    real("delta_a", true, &SystemParams::delta_a);
    real("delta_c", true, &SystemParams::delta_c);
    real("waist", true, &SystemParams::waist);
    real("omega_r", true, &SystemParams::omega_r);
    real("t_final", true, &SystemParams::t_final);
    real("avg_window", false, &SystemParams::avg_window);
    real("init_pos_halfwidth", false, &SystemParams::init_pos_halfwidth);
    real("init_mom_halfwidth", false, &SystemParams::init_mom_halfwidth);
    real("init_n_phot", false, &SystemParams::init_n_phot);
    t["delta_c2"] = {false, [](Config& c, const json& v, const std::string& k) {
                       if (v.is_null()) {
                         c.system.delta_c2.reset();
                       } else {
                         c.system.delta_c2 = number(v, k);
                       }
                     }};
    t["pin_atoms"] = {false, [](Config& c, const json& v, const std::string& k) {
                        if (!v.is_boolean()) throw ConfigError("key '" + k + "' must be true or false");
                        c.system.pin_atoms = v.get<bool>();
                      }};
    t["engine"] = {false, [](Config& c, const json& v, const std::string& k) {
                     if (!v.is_string()) throw ConfigError("key '" + k + "' must be a string");
                     c.engine = closure_from_string(v.get<std::string>());
                   }};
    numeric("rel_tol", &IntegratorSettings::rel_tol);
    numeric("abs_tol", &IntegratorSettings::abs_tol);
    numeric("max_step", &IntegratorSettings::max_step);
    numeric("sample_dt", &IntegratorSettings::sample_dt);
    numeric("min_step", &IntegratorSettings::min_step);
    return t;
  }();
  return table;
}

void validate(const Config& c) {
  validate(c.system);
  validate(c.integrator);
}

Config from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  Config c;
  const auto& table = fields();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second.set(c, value, key);
  }
  for (const auto& [key, field] : table) {
    if (field.mandatory && !doc.contains(key)) {
      throw ConfigError("missing mandatory configuration key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

}  // namespace

std::string to_string(Closure c) {
  return c == Closure::mean_field ? "mean_field" : "second_order";
}

Closure closure_from_string(const std::string& s) {
  if (s == "mean_field") return Closure::mean_field;
  if (s == "second_order") return Closure::second_order;
  throw ConfigError("unknown engine '" + s + "' (expected mean_field or second_order)");
}

Config load_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  return from_json(doc);
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

Config apply_overrides(const Config& base, const std::vector<std::string>& overrides) {
  json doc = to_json(base);
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + ov + "' is not of the form key=value");
    }
    const std::string key = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;  // bare words such as mean_field
    }
    doc[key] = value;
  }
  return from_json(doc);
}

json to_json(const Config& c) {
  const SystemParams& p = c.system;
  json j;
  j["n_atoms"] = p.n_atoms;
  j["g"] = p.g;
  j["kappa"] = p.kappa;
  j["gamma"] = p.gamma;
  j["omega_pump"] = p.omega_pump;
  j["delta_a"] = p.delta_a;
  j["delta_c"] = p.delta_c;
  j["delta_c2"] = p.delta_c2 ? json(*p.delta_c2) : json(nullptr);
  j["waist"] = p.waist;
  j["omega_r"] = p.omega_r;
  j["seed"] = p.seed;
  j["t_final"] = p.t_final;
  j["avg_window"] = p.avg_window;
  j["init_pos_halfwidth"] = p.init_pos_halfwidth;
  j["init_mom_halfwidth"] = p.init_mom_halfwidth;
  j["init_n_phot"] = p.init_n_phot;
  j["pin_atoms"] = p.pin_atoms;
  j["engine"] = to_string(c.engine);
  j["rel_tol"] = c.integrator.rel_tol;
  j["abs_tol"] = c.integrator.abs_tol;
  j["max_step"] = c.integrator.max_step;
  j["sample_dt"] = c.integrator.sample_dt;
  j["min_step"] = c.integrator.min_step;
  return j;
}

std::string serialize(const Config& c) { return to_json(c).dump(2); }

}  // namespace cavsim
