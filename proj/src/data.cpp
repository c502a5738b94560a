#include "dynbc/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dynbc {

const std::vector<std::string>& data_names() {
    static const std::vector<std::string> names{"gaussian_bump", "cauchy_boundary", "constant", "zero"};
    return names;
}

namespace {

void require_known(const std::string& name) {
    const auto& n = data_names();
    if (std::find(n.begin(), n.end(), name) == n.end()) throw DomainError("unknown data name '" + name + "'");
}

}  // namespace

Field interior_data(const std::string& name, const HalfSpaceGrid& grid, double level) {
    require_known(name);
    if (name == "gaussian_bump")
        return Field::sample(grid, [&](double x, double y) { return level * std::exp(-x * x - y * y); });
    if (name == "cauchy_boundary")
        return Field::sample(grid, [&](double x, double y) { return level * (1 + y) / ((1 + y) * (1 + y) + x * x); });
    if (name == "constant")
        return Field(grid, Field::Matrix::Constant(grid.n_depth(), grid.n_lateral(), level), FarField::constant(level));
    return Field(grid);
}

BoundaryField boundary_data(const std::string& name, const HalfSpaceGrid& grid, double level) {
    require_known(name);
    if (name == "gaussian_bump")
        return BoundaryField::sample(grid, [&](double x) { return level * std::exp(-x * x); });
    if (name == "cauchy_boundary") {
        // a / (1 + x^2) = a pi P(x, 0, 1)
        BoundaryFarField far;
        far.add_layer(level * std::numbers::pi, 1.0);
        return BoundaryField::sample(grid, [&](double x) { return level / (1 + x * x); }, far);
    }
    if (name == "constant")
        return BoundaryField(grid, Eigen::VectorXd::Constant(grid.n_lateral(), level), BoundaryFarField(level));
    return BoundaryField(grid);
}

double data_radius(const std::string& name) {
    require_known(name);
    return name == "gaussian_bump" ? std::sqrt(9 * std::log(10.0)) : 0.0;
}

HalfSpaceGrid resolve_grid(const GridSpec& spec, const DataSpec& data, double eps, double horizon,
                           std::vector<std::string>* notes) {
    if (!(eps > 0) || !(horizon > 0)) throw DomainError("resolve_grid: eps and horizon must be positive");
    const double spread = 6 * std::sqrt(horizon);
    const double R = spec.R_prime > 0
                         ? spec.R_prime
                         : std::max(spread, std::max(data_radius(data.phi), data_radius(data.phi_b)) + spread);
    double L = spec.L;
    if (!(L > 0)) {
        L = std::max(4.0, 6 * std::sqrt(horizon / eps));
        if (spec.L_max > 0 && L > spec.L_max) {
            if (notes) {
                std::ostringstream msg;
                msg << "depth " << L << " capped at L_max " << spec.L_max << " for eps " << eps;
                notes->push_back(msg.str());
            }
            L = spec.L_max;
        }
    }
    return HalfSpaceGrid(2, R, L, spec.n_lateral, spec.n_depth);
}

ProblemSpec make_problem(const DataSpec& data, const HalfSpaceGrid& grid, double eps, double horizon) {
    return {interior_data(data.phi, grid, data.level), boundary_data(data.phi_b, grid, data.level), eps, horizon};
}

}  // namespace dynbc
