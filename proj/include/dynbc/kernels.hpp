#pragma once

// Closed-form heat and boundary kernels on the half-space.
//
// Points are split as x = (x', x_N); all dimension-generic kernels take Eigen
// vectors of length N and infer N from the size.

#include <Eigen/Core>
#include <cmath>
#include <numbers>

#include "dynbc/errors.hpp"

namespace dynbc {

/// 1-D heat kernel (4 pi t)^{-1/2} exp(-z^2 / 4t).
template <typename Scalar>
Scalar gauss_kernel_1d(Scalar z, Scalar t) {
    using std::exp;
    using std::sqrt;
    if (!(t > Scalar(0))) throw DomainError("gauss_kernel: time must be positive");
    return exp(-z * z / (Scalar(4) * t)) / sqrt(Scalar(4) * std::numbers::pi_v<Scalar> * t);
}

/// d-dimensional heat kernel, d = z.size().
template <typename Derived>
typename Derived::Scalar gauss_kernel(const Eigen::MatrixBase<Derived>& z, typename Derived::Scalar t) {
    using Scalar = typename Derived::Scalar;
    using std::exp;
    using std::pow;
    if (z.size() < 1) throw DomainError("gauss_kernel: dimension must be at least 1");
    if (!(t > Scalar(0))) throw DomainError("gauss_kernel: time must be positive");
    const Scalar d = Scalar(z.size());
    return pow(Scalar(4) * std::numbers::pi_v<Scalar> * t, -d / Scalar(2)) *
           exp(-z.squaredNorm() / (Scalar(4) * t));
}

/// Evaluation point (x, y, t) for the Dirichlet kernels. x may sit on the
/// boundary, y must be strictly inside.
template <typename Scalar>
struct KernelPoint {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vector x;
    Vector y;
    Scalar t{};

    int dim() const { return static_cast<int>(x.size()); }

    void validate() const {
        if (x.size() < 2 || x.size() != y.size())
            throw DomainError("KernelPoint: x and y must share a dimension N >= 2");
        if (!(x(x.size() - 1) >= Scalar(0))) throw DomainError("KernelPoint: x_N must be >= 0");
        if (!(y(y.size() - 1) > Scalar(0))) throw DomainError("KernelPoint: y_N must be > 0");
        if (!(t > Scalar(0))) throw DomainError("KernelPoint: t must be > 0");
    }
};

namespace detail {

// Lateral factor Gamma_{N-1}(x' - y', t).
template <typename Scalar>
Scalar lateral_gauss(const KernelPoint<Scalar>& p) {
    const int n = p.dim() - 1;
    return gauss_kernel((p.x.head(n) - p.y.head(n)).eval(), p.t);
}

}  // namespace detail

/// Dirichlet heat kernel built by odd reflection across x_N = 0.
///
/// Evaluated in the factored form Gamma_{N-1} * Gamma_1(x_N - y_N) * (1 - e^{-x_N y_N / t}),
/// which avoids cancellation between the direct and reflected Gaussians.
template <typename Scalar>
Scalar dirichlet_heat_kernel(const KernelPoint<Scalar>& p) {
    using std::expm1;
    p.validate();
    const Scalar xn = p.x(p.dim() - 1);
    const Scalar yn = p.y(p.dim() - 1);
    return detail::lateral_gauss(p) * gauss_kernel_1d(xn - yn, p.t) * -expm1(-xn * yn / p.t);
}

/// K = d/dx_N of the Dirichlet heat kernel.
template <typename Scalar>
Scalar dirichlet_kernel_dxn(const KernelPoint<Scalar>& p) {
    p.validate();
    const Scalar xn = p.x(p.dim() - 1);
    const Scalar yn = p.y(p.dim() - 1);
    const Scalar two_t = Scalar(2) * p.t;
    const Scalar depth = -((xn - yn) / two_t) * gauss_kernel_1d(xn - yn, p.t) +
                         ((xn + yn) / two_t) * gauss_kernel_1d(xn + yn, p.t);
    return detail::lateral_gauss(p) * depth;
}

/// c_N with c_N * integral over R^{N-1} of (1 + |z|^2)^{-N/2} equal to one.
/// Computed by quadrature on first use and memoized.
double normalization_constant(int N);

/// P as a function of lateral radius r and s = x_N + t.
template <typename Scalar>
Scalar poisson_dyn_kernel_radial(int N, Scalar r, Scalar s) {
    using std::pow;
    if (!(s > Scalar(0))) throw DomainError("poisson_dyn_kernel: x_N + t must be positive");
    const Scalar q = r / s;
    return Scalar(normalization_constant(N)) * pow(s, Scalar(1 - N)) *
           pow(Scalar(1) + q * q, -Scalar(N) / Scalar(2));
}

/// d/dt of P as a function of lateral radius r and s = x_N + t.
template <typename Scalar>
Scalar poisson_dyn_kernel_dt_radial(int N, Scalar r, Scalar s) {
    const Scalar p = poisson_dyn_kernel_radial(N, r, s);
    const Scalar r2 = r * r;
    const Scalar s2 = s * s;
    return (r2 - Scalar(N - 1) * s2) / (r2 + s2) * p / s;
}

/// Boundary evolution kernel P(x', x_N, t); N = x_prime.size() + 1.
template <typename Derived>
typename Derived::Scalar poisson_dyn_kernel(const Eigen::MatrixBase<Derived>& x_prime,
                                            typename Derived::Scalar x_N,
                                            typename Derived::Scalar t) {
    if (x_N < 0 || t < 0) throw DomainError("poisson_dyn_kernel: x_N and t must be >= 0");
    return poisson_dyn_kernel_radial(static_cast<int>(x_prime.size()) + 1, x_prime.norm(), x_N + t);
}

/// d/dt P(x', x_N, t).
template <typename Derived>
typename Derived::Scalar poisson_dyn_kernel_dt(const Eigen::MatrixBase<Derived>& x_prime,
                                               typename Derived::Scalar x_N,
                                               typename Derived::Scalar t) {
    if (x_N < 0 || t < 0) throw DomainError("poisson_dyn_kernel_dt: x_N and t must be >= 0");
    return poisson_dyn_kernel_dt_radial(static_cast<int>(x_prime.size()) + 1, x_prime.norm(), x_N + t);
}

}  // namespace dynbc
