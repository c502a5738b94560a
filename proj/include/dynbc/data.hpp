#pragma once

// Built-in initial data and the default truncation rules.

#include <string>
#include <vector>

#include "dynbc/grid.hpp"
#include "dynbc/solver.hpp"

namespace dynbc {

/// Names accepted for phi and phi_b.
const std::vector<std::string>& data_names();

/// "gaussian_bump"   phi = a exp(-|x|^2),                phi_b = a exp(-|x'|^2)
/// "cauchy_boundary" phi = a (1+x_N)/((1+x_N)^2+|x'|^2), phi_b = a / (1 + |x'|^2)
/// "constant"        a everywhere
/// "zero"
/// The interior Cauchy profile is the harmonic extension of the boundary one.
struct DataSpec {
    std::string phi = "gaussian_bump";
    std::string phi_b = "cauchy_boundary";
    double level = 1.0;
};

/// Zero entries mean "derive": R' = R_data + 6 sqrt(T) (at least 6 sqrt(T)),
/// L = max(4, 6 sqrt(T / eps)) capped at L_max.
struct GridSpec {
    double R_prime = 0;
    double L = 0;
    double L_max = 16;
    int n_lateral = 129;
    int n_depth = 65;
};

Field interior_data(const std::string& name, const HalfSpaceGrid& grid, double level = 1.0);
BoundaryField boundary_data(const std::string& name, const HalfSpaceGrid& grid, double level = 1.0);
/// Radius beyond which the named datum equals its far field to 1e-9.
double data_radius(const std::string& name);

/// Grid for one eps; notes about capped or overridden truncation go to `notes`.
HalfSpaceGrid resolve_grid(const GridSpec& spec, const DataSpec& data, double eps, double horizon,
                           std::vector<std::string>* notes = nullptr);

ProblemSpec make_problem(const DataSpec& data, const HalfSpaceGrid& grid, double eps, double horizon);

}  // namespace dynbc
