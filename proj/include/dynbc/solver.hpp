#pragma once

// Mild solution (v, w) by Picard iteration of
//   Q[v](t) = S1(t/eps) Phi - D_eps[phi_b](t) - Dt_eps[v](t),
// with w(t) = S2(t) phi_b + int_0^t S2(t - s) g(s) ds, g = d/dx_N v on the
// boundary, and u = v + w.
//
// Time is sampled on an interval [0, T] at the union of a quadratic mesh
// T (k/M)^2, the geometric nodes T 2^{-j}, and any requested output times.
// Between samples the trace g is interpolated (see TraceHistory).

#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "dynbc/duhamel_ops.hpp"
#include "dynbc/grid.hpp"
#include "dynbc/rules.hpp"

namespace dynbc {

/// One instance of the problem: interior data phi, boundary data phi_b,
/// diffusion parameter eps in (0, 1), horizon.
struct ProblemSpec {
    Field phi;
    BoundaryField phi_b;
    double eps = 0.1;
    double horizon = 0.5;
};

struct PreparedProblem {
    ProblemSpec spec;
    Field Phi;      // phi - S2(0) phi_b
    double m = 0;   // 16 max(|phi|, |phi_b|)
};

PreparedProblem prepare(const ProblemSpec& spec);

struct SolverConfig {
    int mesh_cells = 16;
    int geometric_levels = 20;
    double picard_tol = 1e-7;
    int max_iterations = 50;
    double t_min = 1e-6;
    double ratio_threshold = 0.5;
    TimeQuadRule d_rule = d_eps_default_rule();
    TimeQuadRule dt_rule = d_eps_tilde_default_rule();
    TimeQuadRule f2_rule = f2_default_rule();
    TimeQuadRule w_rule = TimeQuadRule(64, 0.5, 0.5);
};

/// Sample times in (0, T], ascending, with the extra times that fall inside.
std::vector<double> interval_times(double T, const SolverConfig& cfg, const std::vector<double>& extra = {});

/// Boundary trace history g(s). Interpolates s^{1/2} g(s) with a monotone
/// cubic in s^{1/2} between stored times; below the first stored time g is
/// continued by the s^{-1/2} envelope through the first value. Appends must
/// be strictly increasing in time; reads are safe concurrently with each other.
class TraceHistory {
public:
    explicit TraceHistory(const HalfSpaceGrid& grid) : grid_(grid) {}

    void append(double t, const BoundaryField& g);
    BoundaryField at(double s) const;
    std::size_t size() const;
    const std::vector<double>& times() const { return times_; }
    TraceFn as_function() const {
        return [this](double s) { return at(s); };
    }

private:
    void rebuild_slopes();

    HalfSpaceGrid grid_;
    std::vector<double> times_;
    std::vector<double> theta_;
    Eigen::MatrixXd scaled_;  // column j: [sqrt(t_j) g_j ; sqrt(t_j) far constant]
    Eigen::MatrixXd slopes_;
    mutable std::shared_mutex mutex_;
};

/// v and d/dx_N v at the sample times of one interval.
struct VHistory {
    std::vector<double> times;
    std::vector<FieldWithDxn> fields;
};

/// Boundary trace of d/dx_N v, with the far-field constant of v's profile.
BoundaryField dxn_trace(const Field& v, const Field& dxn);

/// sup_t |v(t)| + (t/eps)^{1/2} |d/dx_N v(t)| over the history's times.
double xt_norm(const VHistory& v, double eps);
VHistory operator-(const VHistory& a, const VHistory& b);

/// The fixed part S1(t/eps) Phi - D_eps[phi_b](t) at the given times.
VHistory q_eps_base(const PreparedProblem& prob, const std::vector<double>& times, const SolverConfig& cfg);
/// Dt_eps[v] at the history's own times.
VHistory d_tilde_history(const PreparedProblem& prob, const VHistory& v, const SolverConfig& cfg);
/// Q_eps[v] at the history's times.
VHistory q_eps_apply(const PreparedProblem& prob, const VHistory& v, const SolverConfig& cfg);
/// Q_eps[v] given the precomputed base.
VHistory q_eps_apply(const PreparedProblem& prob, const VHistory& base, const VHistory& v, const SolverConfig& cfg);

struct IntervalSolution {
    VHistory v;
    double T_star = 0;
    int iterations = 0;
    std::vector<double> residuals;
    int halvings = 0;
};

/// Picard iteration on [0, T], halving T while the residual ratio stays above
/// the threshold. `initial`, if given and defined on the right times, replaces
/// the default first iterate S1(t/eps) Phi - D_eps[phi_b](t).
IntervalSolution solve_interval(const PreparedProblem& prob, double T_guess, const SolverConfig& cfg = {},
                                const std::vector<double>& extra_times = {},
                                const std::optional<VHistory>& initial = std::nullopt);

struct SolverRun {
    double eps = 0;
    std::vector<double> times;        // absolute, ascending
    std::vector<Field> v;
    std::vector<Field> dxn_v;
    std::vector<Field> w;
    std::vector<Field> u;
    std::vector<BoundaryField> w_boundary;
    /// w(t) - S2(t) phi_b restricted to the boundary, carried across restarts.
    std::vector<BoundaryField> w_memory;
    std::vector<double> interval_starts;
    std::vector<double> T_star;
    std::vector<int> iterations;
    std::vector<std::vector<double>> residuals;
    std::vector<double> norm_history;  // E_eps[v](t) at each stored time
    bool complete = true;
    std::string failure;
};

/// Repeated intervals up to the horizon. Each restart takes the terminal
/// (v, w on the boundary) as new data. Failures are reported in the run with
/// the intervals completed so far.
SolverRun continue_global(const PreparedProblem& prob, double horizon, const SolverConfig& cfg = {},
                          const std::vector<double>& output_times = {});

/// int_0^t W_{t-s} g(s) ds on the boundary lattice.
BoundaryField boundary_memory(const TraceFn& trace, double t, const TimeQuadRule& rule);

}  // namespace dynbc
