#pragma once

// Gauss-Legendre rules and the endpoint-regularizing time quadrature used for
// Duhamel integrals int_0^t f(s) ds with f ~ s^{-a0} near 0 and (t-s)^{-a1} near t.

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <sstream>
#include <type_traits>
#include <vector>

#include "dynbc/errors.hpp"

namespace dynbc {

struct GaussLegendre {
    Eigen::VectorXd nodes;    // on [-1, 1], ascending
    Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; memoized, safe to call concurrently.
const GaussLegendre& gauss_legendre(int n);

/// Integrates f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const GaussLegendre& gl = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += gl.weights(i) * f(mid + half * gl.nodes(i));
    return acc * half;
}

/// One quadrature node of a time rule. `remaining` is b - s computed without
/// cancellation, which matters when the integrand is singular at s = b.
struct TimeNode {
    double s;
    double remaining;
    double weight;
};

/// Quadrature for int_a^b f(s) ds with declared endpoint exponents.
///
/// Uses s = a + (b - a) u(theta), where u is the normalized incomplete
/// integral of sin^{p0-1} cos^{p1-1} on [0, pi/2]; near the ends u behaves like
/// theta^{p0} and 1 - u like (pi/2 - theta)^{p1}. The powers are the smallest
/// integers >= 2 making p (1 - alpha) integral, so the mapped integrand is
/// smooth. With both exponents at most 1/2 and of the form k/2 this is
/// s = a + (b - a) sin^2(theta). Composite Gauss-Legendre panels in theta.
class TimeQuadRule {
public:
    explicit TimeQuadRule(int n_nodes = 64, double alpha_start = 0.5, double alpha_end = 0.5);

    int n_nodes() const { return static_cast<int>(frac_.size()); }
    double alpha_start() const { return alpha_start_; }
    double alpha_end() const { return alpha_end_; }
    int power_start() const { return p0_; }
    int power_end() const { return p1_; }

    std::vector<TimeNode> nodes(double a, double b) const;

private:
    double alpha_start_;
    double alpha_end_;
    int p0_;
    int p1_;
    std::vector<double> frac_;
    std::vector<double> cofrac_;
    std::vector<double> weight_;
};

inline double magnitude(double v) { return std::abs(v); }

namespace detail {

template <class F>
decltype(auto) call_at(F& f, const TimeNode& node) {
    if constexpr (std::is_invocable_v<F&, const TimeNode&>)
        return f(node);
    else
        return f(node.s);
}

inline constexpr double overflow_guard = 1e150;

}  // namespace detail

/// Sum of weight * integrand over a node list. The integrand may take either
/// the node (to see the exact remaining time) or the plain abscissa s.
template <class F>
auto integrate_nodes(F&& integrand, const std::vector<TimeNode>& nodes) {
    using R = std::decay_t<decltype(detail::call_at(integrand, nodes.front()))>;
    if (nodes.empty()) throw DomainError("integrate_nodes: empty node list");
    std::optional<R> acc;
    for (const TimeNode& node : nodes) {
        R value = detail::call_at(integrand, node);
        const double m = magnitude(value) * std::abs(node.weight);
        if (!std::isfinite(m) || m > detail::overflow_guard) {
            std::ostringstream msg;
            msg << "duhamel quadrature: non-integrable growth at s=" << node.s
                << " (remaining " << node.remaining << ", |value*weight|=" << m << ")";
            throw NumericalError(msg.str());
        }
        if (!acc)
            acc.emplace(node.weight * value);
        else
            *acc += node.weight * value;
    }
    return std::move(*acc);
}

/// int_0^t integrand(s) ds with the declared endpoint behaviour of `rule`.
template <class F>
auto duhamel_integrate(F&& integrand, double t, const TimeQuadRule& rule) {
    if (!(t > 0)) throw DomainError("duhamel_integrate: t must be positive");
    return integrate_nodes(std::forward<F>(integrand), rule.nodes(0.0, t));
}

}  // namespace dynbc
