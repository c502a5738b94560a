#pragma once

// Run artifacts: manifest.txt and report.txt (JSON text), field CSVs and the
// rates_<functional>.dat tables.

#include <filesystem>
#include <string>
#include <vector>

#include "dynbc/config.hpp"
#include "dynbc/harness.hpp"
#include "dynbc/oracle.hpp"
#include "dynbc/solver.hpp"

namespace dynbc {

/// Creates the directory if needed and writes `text` to dir/name.
void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text);

struct FieldFile {
    std::string name;   // "u", "v", ...
    double time = 0;
    std::string file;   // relative to the run directory
};

/// Writes the requested fields at the stored times closest to `times`
/// (every stored time when empty). Files are named <field>_<index>.csv.
std::vector<FieldFile> write_run_fields(const std::filesystem::path& dir, const SolverRun& run,
                                        const std::vector<std::string>& fields, const std::vector<double>& times);

/// Manifest of a solve: effective config, resolved grid, per-interval
/// T_star / iterations / residuals, per-time norms and the field files.
std::string solve_manifest(const RunConfig& cfg, const HalfSpaceGrid& grid, const std::vector<std::string>& notes,
                           const SolverRun& run, const std::vector<FieldFile>& files);
/// Manifest of a command that persists no solver history.
std::string command_manifest(const std::string& command, const RunConfig& cfg);

/// Two columns, log10(eps) and log10(value), for the usable points.
std::string rates_table(const FunctionalReport& f);
void write_rates(const std::filesystem::path& dir, const RateReport& report);

/// Short summary of a solve for the terminal.
std::string norm_summary(const SolverRun& run);

/// report.txt of oracle-compare.
std::string oracle_report(const RunConfig& cfg, const HalfSpaceGrid& grid, const FDHistory& fd, const OracleGap& gap,
                          const SolverRun& run);

}  // namespace dynbc
