#pragma once

// Run configuration: one JSON document, every key optional, unknown keys
// rejected. Missing keys take the defaults below; dump_config always writes
// the complete effective document.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynbc/data.hpp"
#include "dynbc/harness.hpp"
#include "dynbc/oracle.hpp"

namespace dynbc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // problem
    int N = 2;
    DataSpec data;
    double eps = 0.1;                    // solve and oracle-compare
    std::vector<double> eps_values = SweepPlan{}.eps_values;  // sweep
    double horizon = 0.5;

    GridSpec grid;
    double quad_tol = 1e-6;
    SolverConfig solver;

    // sweep functionals
    std::vector<std::string> functionals = functional_names();
    double tau1 = 0.1, tau2 = 0.5;
    int window_samples = 5;
    double K_lateral = 1.0, K_depth = 1.0;
    double L_strip = 1.0;
    double t_small = 0.1;

    SuiteConfig suite;
    double fd_dt = 1e-3;

    // outputs
    std::string out_dir = "dynbc_out";
    std::vector<std::string> fields{"u", "v", "w"};  // persisted by solve
    std::vector<double> field_times{0.1, 0.25, 0.5};  // empty: every stored time

    std::uint64_t seed = SuiteConfig{}.seed;
    int threads = 1;

    /// Throws ConfigError on values no command can use.
    void validate() const;
};

/// Defaults overlaid with the given JSON text. Throws ConfigError on syntax
/// errors, unknown keys and type mismatches.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Complete effective config as JSON.
std::string dump_config(const RunConfig& cfg);

/// Names accepted in `fields`.
const std::vector<std::string>& field_names();

SweepPlan sweep_plan(const RunConfig& cfg);
SuiteConfig suite_config(const RunConfig& cfg);
ProblemSpec solve_problem(const RunConfig& cfg, HalfSpaceGrid* grid_out = nullptr,
                          std::vector<std::string>* notes = nullptr);

}  // namespace dynbc
