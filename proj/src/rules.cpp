#include "dynbc/rules.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace dynbc {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

GaussLegendre build_gauss_legendre(int n) {
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [pn, pm] = legendre_pair(n, x);
            const double dx = pn / (n * (x * pn - pm) / (x * x - 1.0));
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const auto [pn, pm] = legendre_pair(n, x);
        const double dp = n * (x * pn - pm) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes(i) = -x;
        gl.nodes(n - 1 - i) = x;
        gl.weights(i) = w;
        gl.weights(n - 1 - i) = w;
    }
    if (n % 2 == 1) gl.nodes(n / 2) = 0.0;
    return gl;
}

int regularizing_power(double alpha) {
    for (int p = 2; p <= 16; ++p) {
        const double e = p * (1.0 - alpha);
        if (std::abs(e - std::round(e)) < 1e-12) return p;
    }
    return static_cast<int>(std::ceil(4.0 / (1.0 - alpha)));
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussLegendre>(build_gauss_legendre(n));
    return *slot;
}

TimeQuadRule::TimeQuadRule(int n_nodes, double alpha_start, double alpha_end)
    : alpha_start_(alpha_start), alpha_end_(alpha_end) {
    if (n_nodes < 1) throw DomainError("TimeQuadRule: need at least one node");
    if (!(alpha_start >= 0 && alpha_start < 1 && alpha_end >= 0 && alpha_end < 1))
        throw DomainError("TimeQuadRule: endpoint exponents must lie in [0, 1)");
    p0_ = regularizing_power(alpha_start);
    p1_ = regularizing_power(alpha_end);

    const double half_pi = 0.5 * std::numbers::pi;
    const int panels = std::max(1, n_nodes / 16);
    const bool plain = p0_ == 2 && p1_ == 2;
    auto density = [&](double th) {
        return std::pow(std::sin(th), p0_ - 1) * std::pow(std::cos(th), p1_ - 1);
    };
    const int inner = 48;
    const double total = plain ? 0.5 : integrate_gl(density, 0.0, half_pi, 96);

    frac_.reserve(n_nodes);
    cofrac_.reserve(n_nodes);
    weight_.reserve(n_nodes);
    for (int p = 0; p < panels; ++p) {
        const int order = n_nodes / panels + (p < n_nodes % panels ? 1 : 0);
        const GaussLegendre& gl = gauss_legendre(order);
        const double lo = half_pi * p / panels;
        const double hi = half_pi * (p + 1) / panels;
        for (int i = 0; i < order; ++i) {
            const double th = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes(i);
            const double w = 0.5 * (hi - lo) * gl.weights(i);
            if (plain) {
                const double sn = std::sin(th), cs = std::cos(th);
                frac_.push_back(sn * sn);
                cofrac_.push_back(cs * cs);
                weight_.push_back(w * 2.0 * sn * cs);
                continue;
            }
            double below, above;
            if (th <= 0.5 * half_pi) {
                below = integrate_gl(density, 0.0, th, inner) / total;
                above = 1.0 - below;
            } else {
                above = integrate_gl(density, th, half_pi, inner) / total;
                below = 1.0 - above;
            }
            frac_.push_back(below);
            cofrac_.push_back(above);
            weight_.push_back(w * density(th) / total);
        }
    }
}

std::vector<TimeNode> TimeQuadRule::nodes(double a, double b) const {
    if (!(b > a)) throw DomainError("TimeQuadRule::nodes: empty interval");
    const double len = b - a;
    std::vector<TimeNode> out(frac_.size());
    for (std::size_t i = 0; i < frac_.size(); ++i)
        out[i] = TimeNode{a + len * frac_[i], len * cofrac_[i], len * weight_[i]};
    return out;
}

}  // namespace dynbc
