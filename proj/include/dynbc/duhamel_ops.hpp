#pragma once

// Forcing terms of the interior equation and the Duhamel integrals built on them.
//
//   F1[phi_b](t) = dP_t/dt * phi_b, extended to depth x_N through P(., x_N, t)
//   F2[v](t)     = P(., x_N, 0) * g(t) + int_0^t dP_{t-r}/dt * g(r) dr
//   D_eps[phi_b](t)  = int_0^t S1((t-s)/eps) F1(s) ds
//   Dt_eps[v](t)     = int_0^t S1((t-s)/eps) F2[v](s) ds
//
// g(r) is the boundary trace of d/dx_N v at time r. Since P(x', x_N, t) only
// depends on x_N + t, both forcings are Poisson extensions of a boundary
// quantity; that is how they are evaluated here.

#include <functional>

#include "dynbc/grid.hpp"
#include "dynbc/rules.hpp"

namespace dynbc {

/// x_N^{-3/4} t^{1/4} for 0 < x_N <= 1, x_N^{-1/2} beyond.
double h_factor(double x_N, double t);

/// d/ds (P_s * psi) on the boundary lattice, s > 0. Constants have zero rate;
/// Poisson layers of the far field contribute their exact rate.
Eigen::VectorXd poisson_rate_row(const BoundaryField& psi, double s);

/// F1[phi_b](t) on every node. The result carries no far field.
Field f1_eval(const BoundaryField& phi_b, double t);

/// Boundary trace history s -> d/dx_N v(., 0, s), s > 0.
using TraceFn = std::function<BoundaryField(double)>;

/// Default rule for the inner memory integral of F2.
TimeQuadRule f2_default_rule();
/// Default rule for D_eps: endpoint exponents (1/4, 1/2).
TimeQuadRule d_eps_default_rule();
/// Default rule for Dt_eps: endpoint exponents (1/2, 7/8).
TimeQuadRule d_eps_tilde_default_rule();

/// int_0^t dP_{t-r}/dt * g(r) dr on the boundary lattice.
BoundaryField f2_memory(const TraceFn& trace, double t, const TimeQuadRule& rule = f2_default_rule());

/// The two parts of F2[v](t): the Poisson extension of the instantaneous
/// trace, and the extension of the memory term.
struct F2Split {
    Field instantaneous;
    Field memory;
};
F2Split f2_split(const TraceFn& trace, double t, const TimeQuadRule& rule = f2_default_rule());
Field f2_eval(const TraceFn& trace, double t, const TimeQuadRule& rule = f2_default_rule());

/// F2 from a precomputed boundary datum g(t) + memory(t).
Field f2_from_boundary(const BoundaryField& total);

/// D_eps[phi_b](t) with its x_N derivative.
FieldWithDxn d_eps_with_dxn(const BoundaryField& phi_b, double eps, double t,
                            const TimeQuadRule& rule = d_eps_default_rule());
Field d_eps_eval(const BoundaryField& phi_b, double eps, double t, const TimeQuadRule& rule = d_eps_default_rule());

/// Dt_eps[v](t) with its x_N derivative.
FieldWithDxn d_eps_tilde_eval(const TraceFn& trace, double eps, double t,
                              const TimeQuadRule& rule = d_eps_tilde_default_rule(),
                              const TimeQuadRule& inner = f2_default_rule());

/// sum_j w_j S1((t - s_j)/eps) F(s_j) over the nodes of rule on [0, t], with
/// F evaluated through `forcing`. Nodes are evaluated independently (in
/// parallel when available) and summed in node order.
FieldWithDxn smoothed_duhamel(const HalfSpaceGrid& grid, double eps, double t, const TimeQuadRule& rule,
                              const std::function<Field(double)>& forcing);

}  // namespace dynbc
