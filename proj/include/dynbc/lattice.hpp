#pragma once

// Product integration of translation-invariant 1-D kernels against piecewise
// linear interpolants on a uniform lattice, plus the spatial convolutions built
// from it.
//
// For a kernel k and lattice spacing h the stencil stores, per cell
// [d h, (d+1) h],
//   m0[d] = int k(z) dz,   m1[d] = int (z/h - d) k(z) dz,
// from closed-form antiderivatives. The weight of input node j seen from output
// node i (lag d = j - i) is m1[d-1] + m0[d] - m1[d], with the missing half at
// the two end nodes.

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

#include "dynbc/grid.hpp"

namespace dynbc {

struct CellMoments {
    double m0;
    double m1;
};

/// Gamma_1(z, tau).
struct GaussFamily {
    double tau;
    CellMoments cell(double a, double b) const;
    double below(double z) const;
    double above(double z) const;
    double mass() const { return 1.0; }
};

/// (z / 2 tau) Gamma_1(z, tau), i.e. -d/dz Gamma_1.
struct GaussSlopeFamily {
    double tau;
    CellMoments cell(double a, double b) const;
    double below(double z) const;
    double above(double z) const;
    double mass() const { return 0.0; }
};

/// P(z, 0, s) for N = 2: c_2 s / (s^2 + z^2). Requires s > 0; the s = 0
/// limit is the identity and is handled by callers.
struct CauchyFamily {
    double s;
    CellMoments cell(double a, double b) const;
    double below(double z) const;
    double above(double z) const;
    double mass() const { return 1.0; }
};

/// d/dt P(z, 0, s) for N = 2: c_2 (z^2 - s^2) / (s^2 + z^2)^2.
struct CauchyRateFamily {
    double s;
    CellMoments cell(double a, double b) const;
    double below(double z) const;
    double above(double z) const;
    double mass() const { return 0.0; }
};

class LatticeStencil {
public:
    /// Cell moments for cells d in [d_lo, d_hi] on spacing h.
    template <class K>
    LatticeStencil(const K& kernel, double h, int d_lo, int d_hi) : h_(h), lo_(d_lo), hi_(d_hi) {
        m0_.resize(d_hi - d_lo + 1);
        m1_.resize(d_hi - d_lo + 1);
        for (int d = d_lo; d <= d_hi; ++d) {
            const CellMoments c = kernel.cell(d * h, (d + 1) * h);
            m0_[d - d_lo] = c.m0;
            m1_[d - d_lo] = c.m1;
        }
        full_.resize(d_hi - d_lo + 1);
        full_(0) = m0_[0] - m1_[0];
        for (int d = d_lo + 1; d <= d_hi; ++d) full_(d - d_lo) = m1_[d - 1 - d_lo] + m0_[d - d_lo] - m1_[d - d_lo];
    }

    double spacing() const { return h_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    double m0(int d) const { return m0_.at(d - lo_); }
    double m1(int d) const { return m1_.at(d - lo_); }

    /// Interior node at lag d.
    double full(int d) const { return m1(d - 1) + m0(d) - m1(d); }
    /// full(d) for d in [lo + 1, hi] at index d - lo (entry 0 has no left cell).
    const Eigen::VectorXd& full_weights() const { return full_; }
    /// First lattice node (only the cell to its right).
    double first(int d) const { return m0(d) - m1(d); }
    /// Last lattice node (only the cell to its left).
    double last(int d) const { return m1(d - 1); }

private:
    double h_ = 0.0;
    int lo_ = 0;
    int hi_ = -1;
    std::vector<double> m0_;
    std::vector<double> m1_;
    Eigen::VectorXd full_;
};

/// Stencil covering every lag of an n-node lateral lattice.
template <class K>
LatticeStencil lateral_stencil(const K& kernel, double h, int n) {
    return LatticeStencil(kernel, h, -n, n - 1);
}

/// Stencil covering direct and reflected lags of an n-node depth lattice.
template <class K>
LatticeStencil depth_stencil(const K& kernel, double h, int n) {
    return LatticeStencil(kernel, h, -n, 2 * n - 1);
}

/// W(i, j) = weight of input node j at output node i, n x n.
Eigen::MatrixXd lateral_matrix(const LatticeStencil& st, int n);
/// Depth operator for a kernel k(y - x) -/+ k(y + x): sign = -1 gives the
/// odd reflection (Dirichlet values), +1 the even one.
Eigen::MatrixXd depth_matrix(const LatticeStencil& st, int n, double sign);
/// out = W in, without forming W.
Eigen::VectorXd apply_lateral(const LatticeStencil& st, const Eigen::VectorXd& in);

/// Shared cache of boundary-kernel stencils keyed by (family, s, h, n).
/// Concurrent lookups take a shared lock; insertion is exclusive.
class StencilCache {
public:
    explicit StencilCache(std::size_t max_entries = 16384);
    ~StencilCache();

    std::shared_ptr<const LatticeStencil> cauchy(double s, double h, int n);
    std::shared_ptr<const LatticeStencil> cauchy_rate(double s, double h, int n);
    std::size_t size() const;
    void clear();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

StencilCache& stencil_cache();

/// Boundary convolution by the trapezoid rule on the lattice:
/// h sum_j' k(x_i - y_j) psi_j + psi_far * tail_mass(x_i).
BoundaryField convolve_boundary(const std::function<double(double)>& kernel, const BoundaryField& psi,
                                const std::function<double(double)>& tail_mass);
/// Same with a tail mass that does not depend on the output node.
BoundaryField convolve_boundary(const std::function<double(double)>& kernel, const BoundaryField& psi,
                                double tail_mass);
/// Product-integration boundary convolution of a kernel with total mass `mass`.
BoundaryField convolve_boundary(const LatticeStencil& st, double mass, const BoundaryField& psi);

/// Half-space convolution by the trapezoid rule over the box plus
/// far-field constant * tail_mass(x', x_N). O(n^4); reference path.
Field convolve_halfspace(const std::function<double(double, double, double, double)>& kernel,
                         const Field& phi, const std::function<double(double, double)>& tail_mass);

}  // namespace dynbc
