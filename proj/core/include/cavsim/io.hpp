#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavsim/config.hpp"
#include "cavsim/oracle.hpp"
#include "cavsim/scan.hpp"
#include "cavsim/simulation.hpp"
#include "cavsim/spectrum.hpp"

namespace cavsim::io {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Header: t, flag, every layout column, then obs_theta, obs_abs_theta,
// obs_e_kin, obs_n_phot, obs_inversion (and obs_n_phot_b for two modes).
void write_trajectory_csv(const std::filesystem::path& path, const RunResult& run);

// Header: param1, param2, abs_theta, theta, n_phot, e_kin, inversion, delta,
// threshold_margin, seed, status. Failed cells carry NaN in every observable.
void write_scan_csv(const std::filesystem::path& path, const ScanGrid& grid);

// One field as an axis1 x axis2 matrix for heat maps. e_kin is clipped at
// ekin_cap (hbar*omega_r) when ekin_cap > 0; stored data is never clipped.
void write_scan_heatmap(const std::filesystem::path& path, const ScanGrid& grid,
                        const std::string& field, double ekin_cap = 10.0);

void write_correlation_csv(const std::filesystem::path& path, const CorrelationSeries& c);

// Header: omega, s_normalized, s_raw.
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumResult& s);

nlohmann::json features_to_json(const std::vector<Feature>& features);
nlohmann::json report_to_json(const oracle::ComparisonReport& r);
nlohmann::json scan_spec_to_json(const ScanSpec& s);

// Sidecar describing how an output was produced: tool version, command,
// resolved configuration and any extra fields.
nlohmann::json metadata(const std::string& command, const Config& c,
                        const nlohmann::json& extra = nlohmann::json::object());

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace cavsim::io
