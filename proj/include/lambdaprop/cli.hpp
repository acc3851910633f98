#pragma once

// Command front end. Each command reads a config file, runs the solvers and
// writes CSV/JSON artifacts; run_cli parses arguments and maps errors to exit codes.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lambdaprop/characteristics.hpp"
#include "lambdaprop/core.hpp"
#include "lambdaprop/error.hpp"

namespace lambdaprop {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSolver = 2;

/// 1 for config and I/O problems, 2 for solver failures.
int exit_code_for(ErrorKind kind);

/// Full-precision scientific notation (17 significant digits).
std::string format_double(double v);

/// fields.csv, populations.csv, projections.csv, summary.json.
void cmd_simulate(const std::filesystem::path& config_path, const std::filesystem::path& output_dir);

/// analytic.csv and summary.json.
void cmd_analytic(const std::filesystem::path& config_path, const std::filesystem::path& output_dir);

/// Limits report as JSON.
void cmd_limits(const std::filesystem::path& config_path, std::ostream& out);

/// compare.csv and summary.json.
void cmd_compare(const std::filesystem::path& config_path, const std::filesystem::path& output_dir);

/// scan.csv with one row per value, in the given order. Values are validated
/// before any run; a run that fails records its error in the status column.
void cmd_scan(const std::filesystem::path& config_path, const std::string& param,
              const std::vector<std::string>& values, const std::filesystem::path& output_dir, unsigned jobs = 1);

/// One analytic.csv row per (η, τ) node of the config grid.
struct AnalyticRow {
    double eta = 0.0;
    double tau = 0.0;
    std::optional<CharacteristicPoint> point;
    bool horizon = false;
    bool shock = false;
};

std::vector<AnalyticRow> analytic_table(const SimulationConfig& config, const EntranceProfile& profile);
void write_analytic_csv(const std::filesystem::path& path, std::span<const AnalyticRow> rows);

/// Parses `args` (without the program name) and runs one command. Diagnostics
/// go to `err`, limits JSON to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lambdaprop
