#include <doctest.h>

#include <random>

#include "cavsim/config.hpp"
#include "cavsim/error.hpp"
#include "helpers.hpp"

using namespace cavsim;

namespace {

const char* kMinimal = R"({
  "n_atoms": 100, "g": 1.0, "kappa": 10.0, "omega_pump": 5.0,
  "delta_a": -20.0, "delta_c": -10.0, "waist": 1000.0, "omega_r": 1.0,
  "seed": 1, "t_final": 100.0
})";

nlohmann::json minimal() { return nlohmann::json::parse(kMinimal); }

}  // namespace

TEST_SUITE("config") {

TEST_CASE("shipped reference parameter file") {
  const Config c = load_config_file(CAVSIM_CONFIG_DIR "/fig1.json");
  CHECK(c.system.n_atoms == 100);
  CHECK(c.system.g == 1.0);
  CHECK(c.system.kappa == 10.0);
  CHECK(c.system.omega_pump == 5.0);
  CHECK(c.system.delta_a == -20.0);
  CHECK(c.system.delta_c == -10.0);
  CHECK(c.system.waist == 1000.0);
  CHECK(c.system.omega_r == 1.0);
  CHECK(c.system.gamma == 1.0);
  CHECK_FALSE(c.system.delta_c2.has_value());
  CHECK(c.engine == Closure::second_order);
}

TEST_CASE("every shipped configuration loads") {
  for (const char* name : {"fig1", "fig1_desk", "fig5f_desk", "fig6_filter", "oracle_n2",
                           "empty_cavity"}) {
    INFO(name);
    CHECK_NOTHROW(load_config_file(std::string(CAVSIM_CONFIG_DIR "/") + name + ".json"));
  }
  CHECK(load_config_file(CAVSIM_CONFIG_DIR "/fig6_filter.json").system.delta_c2.has_value());
}

TEST_CASE("omitting delta_c2 disables the filter mode") {
  const Config c = load_config(kMinimal);
  CHECK_FALSE(c.system.delta_c2.has_value());
  auto j = minimal();
  j["delta_c2"] = -20.0;
  CHECK(load_config(j.dump()).system.delta_c2 == -20.0);
}

TEST_CASE("range and type errors") {
  auto bad = [](const char* key, nlohmann::json v) {
    auto j = minimal();
    j[key] = v;
    return j.dump();
  };
  CHECK_THROWS_AS(load_config(bad("kappa", -1.0)), ConfigError);
  CHECK_THROWS_AS(load_config(bad("waist", 0.0)), ConfigError);
  CHECK_THROWS_AS(load_config(bad("omega_r", -2.0)), ConfigError);
  CHECK_THROWS_AS(load_config(bad("n_atoms", 0)), ConfigError);
  CHECK_THROWS_AS(load_config(bad("n_atoms", 2.5)), ConfigError);
  CHECK_THROWS_AS(load_config(bad("seed", -3)), ConfigError);
  CHECK_THROWS_AS(load_config(bad("gamma", 2.0)), ConfigError);
  CHECK_THROWS_AS(load_config(bad("g", "one")), ConfigError);
  CHECK_THROWS_AS(load_config(bad("engine", "third_order")), ConfigError);
  CHECK_THROWS_AS(load_config(bad("pin_atoms", 1)), ConfigError);
  CHECK_THROWS_AS(load_config("{\"n_atoms\": "), ConfigError);
  CHECK_THROWS_AS(load_config("[1, 2]"), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
  auto j = minimal();
  j["kapa"] = 10.0;
  CHECK_THROWS_AS(load_config(j.dump()), ConfigError);
}

TEST_CASE("every mandatory key is required") {
  const auto full = minimal();
  for (const auto& [key, value] : full.items()) {
    INFO(key);
    auto j = minimal();
    j.erase(key);
    CHECK_THROWS_AS(load_config(j.dump()), ConfigError);
  }
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_config_file("/nonexistent/cavsim.json"), ConfigError);
}

TEST_CASE("serialize then load is the identity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 30.0);
  for (int trial = 0; trial < 50; ++trial) {
    Config c = testing::fig1_config(1 + trial);
    c.system.g = u(rng);
    c.system.kappa = u(rng);
    c.system.delta_c = -u(rng);
    c.system.omega_pump = u(rng) / 3.0;
    c.system.seed = rng();
    if (trial % 2) c.system.delta_c2 = -u(rng);
    c.system.pin_atoms = trial % 3 == 0;
    c.engine = trial % 4 == 0 ? Closure::mean_field : Closure::second_order;
    c.integrator.rel_tol = 1e-7 * u(rng);
    CHECK(load_config(serialize(c)) == c);
  }
}

TEST_CASE("overrides apply in order and the last one wins") {
  const Config base = load_config(kMinimal);
  const Config c = apply_overrides(base, {"g=2", "delta_c=-3.5", "g=0.5", "engine=mean_field",
                                          "delta_c2=-20", "pin_atoms=true"});
  CHECK(c.system.g == 0.5);
  CHECK(c.system.delta_c == -3.5);
  CHECK(c.engine == Closure::mean_field);
  CHECK(c.system.delta_c2 == -20.0);
  CHECK(c.system.pin_atoms);
  CHECK(apply_overrides(c, {"delta_c2=null"}).system.delta_c2 == std::nullopt);
  CHECK(apply_overrides(base, {}) == base);
}

TEST_CASE("bad overrides") {
  const Config base = load_config(kMinimal);
  CHECK_THROWS_AS(apply_overrides(base, {"g"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"=3"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"gg=3"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"kappa=-1"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"g=abc"}), ConfigError);
}

}  // TEST_SUITE
