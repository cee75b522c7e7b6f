#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "extruder/feasibility.hpp"
#include "extruder/sim.hpp"

namespace extruder {

inline constexpr std::string_view kVersion = "0.1.0";

/// Parses an INI scenario description. Sections and keys:
///
///   [model]        L N0 xi B Kd rho0 S_eff eta time_unit
///   [perturbation] eps omega
///   [setpoint]     x_star v_max S | S_offset
///   [sim]          mode x0 u_history0 tau horizon seed
///
/// Missing keys take the defaults of default_scenario(); S defaults to S_min + S_offset with
/// S_offset = 30. time_unit ("min" or "s") applies to omega, tau and horizon; the resolved
/// config is always in minutes. Unknown sections or keys and invariant violations raise
/// ConfigError.
ScenarioConfig parse_config(std::string_view text);

/// Reads and parses a config file.
ScenarioConfig load_config(const std::string& path);

/// INI text that parses back to the same config bit for bit.
std::string echo_config(const ScenarioConfig& config);

struct RunManifest {
    std::string config_path;
    std::string config_echo;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;
    FeasibilityVerdict verdict;
    RunMonitors monitors;
    std::string mode;
};

/// Manifest as pretty-printed JSON text.
std::string manifest_json(const RunManifest& manifest);

/// Directory for outputs: the EXTRUDER_OUTPUT_DIR environment variable, else the fallback.
std::string default_output_dir(const std::string& fallback = ".");

}  // namespace extruder
