#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavsim/integrator.hpp"
#include "cavsim/layout.hpp"
#include "cavsim/params.hpp"

namespace cavsim {

// Everything a run consumes: physics, numerics and the moment closure.
struct Config {
  SystemParams system;
  IntegratorSettings integrator;
  Closure engine = Closure::second_order;

  friend bool operator==(const Config&, const Config&) = default;
};

std::string to_string(Closure c);
Closure closure_from_string(const std::string& s);

// Parses a flat JSON object. Mandatory keys: n_atoms, g, kappa, omega_pump,
// delta_a, delta_c, waist, omega_r, seed, t_final. Everything else is
// optional (see README for the schema). Unknown keys, wrong types and
// out-of-range values throw ConfigError.
Config load_config(std::string_view text);
Config load_config_file(const std::string& path);

// Applies "key=value" overrides in order (last wins) and re-validates.
Config apply_overrides(const Config& base, const std::vector<std::string>& overrides);

// Fully resolved configuration; load_config(serialize(c)) == c.
nlohmann::json to_json(const Config& c);
std::string serialize(const Config& c);

}  // namespace cavsim
