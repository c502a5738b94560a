#pragma once

// S1(tau): Dirichlet heat semigroup on the half-space, with its x_N derivative.
// S2(t):   boundary-driven Poisson evolution, [S2(t) psi](x', x_N) = P_{x_N + t} * psi.

#include <Eigen/Core>

#include "dynbc/grid.hpp"

namespace dynbc {

/// S1(tau) on a grid. Holds the lateral Gaussian matrix and the two depth
/// matrices (values and x_N derivative); applying it costs two dense products.
///
/// The input is split as far-field profile + remainder. The remainder is
/// interpolated piecewise linearly inside the box and taken as zero outside;
/// the far-field profile is propagated exactly.
class S1Op {
public:
    S1Op(const HalfSpaceGrid& grid, double tau);

    const HalfSpaceGrid& grid() const { return grid_; }
    double tau() const { return tau_; }

    Field apply(const Field& phi) const;
    Field apply_dxn(const Field& phi) const;
    FieldWithDxn apply_with_dxn(const Field& phi) const;

    const Eigen::MatrixXd& lateral() const { return lateral_; }
    const Eigen::MatrixXd& depth() const { return depth_; }
    const Eigen::MatrixXd& depth_dxn() const { return depth_dxn_; }

private:
    Eigen::MatrixXd lateral_pass(const Field& phi) const;

    HalfSpaceGrid grid_;
    double tau_;
    Eigen::MatrixXd lateral_;
    Eigen::MatrixXd depth_;
    Eigen::MatrixXd depth_dxn_;
};

/// S2(t) on a grid, t >= 0. Row k uses the boundary kernel with parameter
/// x_N(k) + t; at t = 0 the boundary row is the identity and the interior rows
/// form the Poisson extension.
///
/// Far-field layers of psi are propagated exactly. The interior Field keeps
/// only the constant part of the profile.
class S2Op {
public:
    S2Op(const HalfSpaceGrid& grid, double t);

    const HalfSpaceGrid& grid() const { return grid_; }
    double time() const { return t_; }

    Field apply(const BoundaryField& psi) const;
    /// Only the x_N = 0 row.
    BoundaryField apply_boundary(const BoundaryField& psi) const;

private:
    HalfSpaceGrid grid_;
    double t_;
};

inline Field s1_apply(const S1Op& op, const Field& phi) { return op.apply(phi); }
inline Field s1_apply_dxn(const S1Op& op, const Field& phi) { return op.apply_dxn(phi); }
inline Field s2_apply(const S2Op& op, const BoundaryField& psi) { return op.apply(psi); }

/// S2(0) psi: harmonic extension of boundary data.
Field poisson_extension(const BoundaryField& psi);

/// One boundary row of S2: P_s * psi at the lattice nodes (identity for s == 0)
/// and its far-field profile. The part of psi not described by its far field
/// is integrated inside the box; its mass re-enters the profile as one more
/// Poisson layer of spread s.
struct PoissonRow {
    Eigen::VectorXd values;
    BoundaryFarField far;
};
PoissonRow poisson_row(const BoundaryField& psi, double s);

/// Trapezoid mass of lattice values (the integral of their linear interpolant).
double lattice_mass(const Eigen::VectorXd& v, double h);

}  // namespace dynbc
