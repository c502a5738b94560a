#pragma once

// Verification suites and the eps-sweep with log-log rate fits.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynbc/data.hpp"
#include "dynbc/solver.hpp"

namespace dynbc {

// ---------------------------------------------------------------- rate fits

struct RatePoint {
    double eps = 0;
    double value = 0;
};

struct RateFit {
    double slope = 0;
    double intercept = 0;  // natural log
    double residual = 0;   // RMS of natural-log residuals
    int points = 0;
    std::vector<std::string> notes;
};

/// Least squares of log(value) on log(eps). Nonpositive values are dropped
/// with a note; fewer than three usable points throws DomainError.
RateFit fit_rate(const std::vector<RatePoint>& points);

// ----------------------------------------------------------------- sweep

/// Functional names, in report order.
const std::vector<std::string>& functional_names();

struct SlopeBand {
    double lo = 0, hi = 0;
};
/// Expected slope band of a named functional.
SlopeBand expected_band(const std::string& functional);

struct SweepPlan {
    DataSpec data;
    GridSpec grid;
    SolverConfig solver;
    double horizon = 0.5;
    std::vector<double> eps_values{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    std::vector<std::string> functionals = functional_names();
    double tau1 = 0.1, tau2 = 0.5;
    int window_samples = 5;       // output times tau1 .. tau2, evenly spaced
    double K_lateral = 1.0;       // K = {|x'| <= K_lateral, 0 <= x_N <= K_depth}
    double K_depth = 1.0;
    double L_strip = 1.0;
    double t_small = 0.1;
    double quad_tol = 1e-6;       // relative operator tolerance, sets the floor

    /// Throws DomainError when the plan is inconsistent.
    void validate() const;
};

struct SweepPoint {
    double eps = 0;
    bool solved = false;
    std::string failure;
    HalfSpaceGrid grid{2, 1.0, 1.0, 3, 3};
    std::vector<double> T_star;
    std::vector<int> iterations;
    std::vector<std::string> notes;
    double smallest_time = 0;
    /// Values in the order of plan.functionals; NaN when missing.
    std::vector<double> values;
};

struct FunctionalReport {
    std::string name;
    SlopeBand band;
    std::vector<RatePoint> points;      // all computed points
    std::vector<std::string> point_status;  // "ok", "below floor", "missing"
    double floor = 0;
    std::optional<RateFit> fit;
    bool monotone = true;
    /// "pass", "fail", "below floor", "insufficient points"
    std::string status;
};

struct RateReport {
    std::vector<SweepPoint> runs;
    std::vector<FunctionalReport> functionals;
    bool bands_pass() const;
    bool insufficient() const;
};

/// Gap functionals of one solver run; `values` follows plan.functionals.
std::vector<double> evaluate_functionals(const SweepPlan& plan, const ProblemSpec& spec, const SolverRun& run);

/// Classifies the per-eps values, fits and checks bands.
FunctionalReport assess_functional(const std::string& name, const std::vector<RatePoint>& points,
                                   const std::vector<bool>& present, double floor);

RateReport run_sweep(const SweepPlan& plan);

/// Deterministic key-value text of a report.
std::string format_report(const RateReport& report);

/// Output times tau1 .. tau2 used for the window functional.
std::vector<double> window_times(const SweepPlan& plan);

// ------------------------------------------------------------- lemma suite

struct SuiteConfig {
    int n_lateral = 65;
    int n_depth = 33;
    double R_prime = 8.0;
    double L = 2.0;
    int instances = 100;
    std::uint64_t seed = 20240601;
    double slack = 1e-4;          // relative slack on sharp inequalities
    double stability = 0.2;       // calibrated constants may move this much under refinement
};

struct SuiteEntry {
    std::string name;
    bool pass = false;
    /// Headroom: bound minus observed, relative to the bound (negative when violated).
    double margin = 0;
    std::string detail;
};

struct SuiteReport {
    std::vector<SuiteEntry> entries;
    bool all_pass() const;
};

SuiteReport run_lemma_suite(const SuiteConfig& cfg);
std::string format_suite(const SuiteReport& report);

}  // namespace dynbc
