#pragma once

// Line-oriented `key = value` configuration files. `#` starts a comment,
// keys are the SimulationConfig field names, unknown keys are rejected.

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>

#include "lambdaprop/core.hpp"

namespace lambdaprop {

/// Environment variable overriding default resolution: "n_tau" or "n_tau,eta_steps_per_unit".
inline constexpr const char* kDefaultGridEnv = "LAMBDAPROP_DEFAULT_GRID";

std::span<const std::string_view> config_keys();

bool is_config_key(std::string_view key);

/// Sets one field from its textual value. Throws invalid_config on unknown key or bad value.
void apply_config_value(SimulationConfig& config, std::string_view key, std::string_view value);

/// Parses and validates. `source` names the input in error messages.
SimulationConfig parse_config(std::istream& in, std::string_view source = "<config>");
SimulationConfig parse_config_string(std::string_view text);
SimulationConfig load_config(const std::filesystem::path& path);

/// Config whose unset resolution fields honor kDefaultGridEnv.
SimulationConfig default_config();

/// One `key = value` line per field, parseable by parse_config.
std::string format_config(const SimulationConfig& config);

}  // namespace lambdaprop
