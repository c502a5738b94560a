#pragma once

// Independent references: a finite-difference solver for
//   eps u_t = Lap u (x_N > 0),  u_t = d/dx_N u (x_N = 0),
// and the limit profile S2(t) phi_b.

#include <string>
#include <vector>

#include "dynbc/grid.hpp"
#include "dynbc/solver.hpp"

namespace dynbc {

/// Backward Euler on the grid lattice with a 5-point Laplacian. The boundary
/// law uses the one-sided 3-point derivative and sits in the same sparse
/// system as the interior, so every step is a single linear solve. The
/// artificial walls x_N = L and |x'| = R' are homogeneous Neumann.
struct FDConfig {
    double dt = 1e-3;
    std::vector<double> output_times;  // rounded to the nearest step
};

struct FDHistory {
    std::vector<double> times;
    std::vector<Field> u;
    double diffusion_number = 0;       // dt / (eps min(dx)^2)
    double pollution_radius = 0;       // sqrt(t_max / eps)
    std::vector<std::string> warnings;
};

FDHistory fd_solve(const ProblemSpec& spec, const FDConfig& cfg);

/// One implicit diffusion step eps (u' - u)/dt = Lap u' with the boundary row
/// held at its current values and Neumann walls elsewhere.
Field fd_interior_step(const Field& u, double eps, double dt);

/// S2(t) phi_b on the grid.
Field limit_solution(const BoundaryField& phi_b, double t);

/// 5-point Laplacian at nodes with four lattice neighbours; zero elsewhere.
Field discrete_laplacian(const Field& f);

/// sup over {|x'| <= K_lateral, x_N <= K_depth} of |u_fd - u_mild| at the FD
/// output times. Each FD time must match a stored mild time to 1e-9.
struct OracleGap {
    std::vector<double> times;
    std::vector<double> gaps;
    double sup_gap = 0;
};
OracleGap oracle_gap(const SolverRun& run, const FDHistory& fd, double K_lateral, double K_depth);

}  // namespace dynbc
