#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "dynbc/kernels.hpp"
#include "dynbc/lattice.hpp"
#include "dynbc/rules.hpp"
#include "dynbc/semigroups.hpp"
#include "support/oracles.hpp"

using namespace dynbc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss-Legendre rules are exact on polynomials", "[quadrature]") {
    for (int n : {1, 2, 5, 16, 33}) {
        const GaussLegendre& gl = gauss_legendre(n);
        CHECK_THAT(gl.weights.sum(), WithinAbs(2.0, 1e-14));
        for (int p = 0; p < 2 * n; ++p) {
            const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
            double acc = 0;
            for (int i = 0; i < n; ++i) acc += gl.weights(i) * std::pow(gl.nodes(i), p);
            CHECK_THAT(acc, WithinAbs(exact, 1e-13));
        }
    }
}

TEST_CASE("time quadrature on weakly singular integrands", "[quadrature]") {
    const TimeQuadRule plain;
    CHECK(plain.power_start() == 2);
    CHECK(plain.power_end() == 2);
    CHECK_THAT(duhamel_integrate([](double) { return 1.0; }, 2.0, plain), WithinAbs(2.0, 1e-13));
    CHECK_THAT(duhamel_integrate([](double s) { return 1.0 / std::sqrt(s); }, 1.0, plain), WithinAbs(2.0, 1e-8));
    CHECK_THAT(duhamel_integrate([](const TimeNode& n) { return 1.0 / std::sqrt(n.remaining); }, 1.0, plain),
               WithinAbs(2.0, 1e-8));

    const TimeQuadRule beta_rule(64, 0.25, 0.5);
    const double b = duhamel_integrate(
        [](const TimeNode& n) { return std::pow(n.remaining, -0.5) * std::pow(n.s, -0.25); }, 1.0, beta_rule);
    CHECK_THAT(b, WithinAbs(std::beta(0.75, 0.5), 1e-6));
    CHECK_THAT(b, WithinAbs(2.3962, 1e-4));

    // worst declared exponent 7/8
    const TimeQuadRule worst(64, 0.5, 0.875);
    const double w = duhamel_integrate(
        [](const TimeNode& n) { return std::pow(n.remaining, -0.875) * std::pow(n.s, -0.5); }, 1.0, worst);
    CHECK_THAT(w, WithinRel(std::beta(0.5, 0.125), 1e-6));
    const double w3 = duhamel_integrate(
        [](const TimeNode& n) { return std::pow(n.remaining, -0.875) * std::pow(n.s, 0.25); }, 3.0,
        TimeQuadRule(64, 0.0, 0.875));
    CHECK_THAT(w3, WithinRel(std::pow(3.0, 0.375) * std::beta(1.25, 0.125), 1e-6));
    // the s^{1/4} (t-s)^{-7/8} shape
    const double l32 = duhamel_integrate(
        [](const TimeNode& n) { return std::pow(n.s, 0.25) * std::pow(n.remaining, -0.875); }, 1.0,
        TimeQuadRule(64, 0.5, 0.875));
    CHECK_THAT(l32, WithinRel(std::beta(1.25, 0.125), 1e-6));

    CHECK_THROWS_AS(duhamel_integrate([](double s) { return std::exp(1.0 / s); }, 1.0, plain), NumericalError);
    CHECK_THROWS_AS(duhamel_integrate([](double) { return 1.0; }, 0.0, plain), DomainError);
    CHECK_THROWS_AS(TimeQuadRule(64, 1.0, 0.0), DomainError);

    // nodes stay strictly inside and remaining is consistent
    for (const auto& n : TimeQuadRule(32, 0.875, 0.25).nodes(1.0, 3.0)) {
        CHECK(n.s >= 1.0);
        CHECK(n.remaining > 0.0);
        CHECK_THAT(n.s + n.remaining, WithinAbs(3.0, 1e-14));
    }
}

namespace {

template <class K>
void check_cells(const K& fam, const std::function<double(double)>& k) {
    for (auto [a, b] : {std::pair{-3.0, -2.5}, {-0.25, 0.0}, {0.0, 0.125}, {0.3, 0.55}, {2.0, 2.125}, {-0.1, 0.2}}) {
        const CellMoments m = fam.cell(a, b);
        const double m0 = oracle::integrate(k, a, b, 1e-15);
        const double m1 = oracle::integrate([&](double z) { return (z - a) / (b - a) * k(z); }, a, b, 1e-15);
        CHECK_THAT(m.m0, WithinAbs(m0, 1e-13));
        CHECK_THAT(m.m1, WithinAbs(m1, 1e-13));
    }
    for (double z : {-1.0, 0.0, 0.7}) {
        CHECK_THAT(fam.below(z) + fam.above(z), WithinAbs(fam.mass(), 1e-14));
        CHECK_THAT(fam.above(z), WithinAbs(oracle::integrate_to_inf(k, z, 1e-14), 1e-11));
    }
}

}  // namespace

TEST_CASE("closed-form cell moments", "[quadrature]") {
    for (double tau : {0.01, 0.3, 5.0}) {
        check_cells(GaussFamily{tau}, [tau](double z) { return gauss_kernel_1d(z, tau); });
        check_cells(GaussSlopeFamily{tau}, [tau](double z) { return z / (2 * tau) * gauss_kernel_1d(z, tau); });
    }
    for (double s : {0.05, 1.0, 4.0}) {
        const double c = normalization_constant(2);
        check_cells(CauchyFamily{s}, [=](double z) { return c * s / (s * s + z * z); });
        check_cells(CauchyRateFamily{s}, [=](double z) { return c * (z * z - s * s) / std::pow(s * s + z * z, 2); });
    }
}

TEST_CASE("lattice weights reproduce kernel mass", "[quadrature]") {
    const int n = 41;
    const double h = 0.1;
    for (double tau : {0.001, 0.05, 2.0}) {
        const GaussFamily fam{tau};
        const Eigen::MatrixXd W = lateral_matrix(lateral_stencil(fam, h, n), n);
        for (int i = 0; i < n; ++i) {
            const double inside = W.row(i).sum();
            const double outside = fam.below(-i * h) + fam.above((n - 1 - i) * h);
            CHECK_THAT(inside + outside, WithinAbs(1.0, 1e-14));
        }
        CHECK(W.minCoeff() >= 0.0);
    }
}

TEST_CASE("reference boundary convolution", "[quadrature]") {
    const HalfSpaceGrid g(2, 6.0, 1.0, 2401, 2);
    const double c2 = normalization_constant(2);
    const auto P1 = [c2](double z) { return c2 / (1 + z * z); };
    const auto tail = [&](double x) {
        const CauchyFamily f{1.0};
        return f.below(-g.lateral_radius() - x) + f.above(g.lateral_radius() - x);
    };
    const auto one = convolve_boundary(P1, BoundaryField::sample(g, [](double) { return 1.0; }, 1.0), tail);
    CHECK((one.values().array() - 1.0).abs().maxCoeff() < 1e-6);
    CHECK(sup_norm(convolve_boundary(P1, BoundaryField(g), tail)) == 0.0);

    const auto bump = BoundaryField::sample(g, [](double x) { return std::abs(x) < 1 ? 1.0 : 0.0; });
    const auto smoothed = convolve_boundary([](double z) { return gauss_kernel_1d(z, 0.3); }, bump, 0.0);
    CHECK(smoothed.values().maxCoeff() <= 1.0);
    CHECK(smoothed.values().minCoeff() >= 0.0);
    CHECK_THROWS_AS(convolve_boundary(P1, bump, 1.5), DomainError);
    CHECK_THROWS_AS(convolve_boundary(P1, bump, -0.1), DomainError);
}

TEST_CASE("product-integration boundary convolution converges at second order", "[quadrature]") {
    // P_s * 1/(1+x^2) = (1+s)/((1+s)^2 + x^2)
    double prev = 1.0;
    for (int r = 0; r < 3; ++r) {
        const HalfSpaceGrid g(2, 4.0, 1.0, 32 * (1 << r) + 1, 2);
        const auto psi = BoundaryField::sample(g, [](double x) { return 1.0 / (1 + x * x); });
        const double s = 0.3;
        const auto out = convolve_boundary(*stencil_cache().cauchy(s, g.lateral_step(), g.n_lateral()), 1.0, psi);
        // the truncated tail beyond R' is the same for every grid; compare against the truncated exact value
        double err = 0;
        for (int i = 0; i < g.n_lateral(); i += (1 << r)) {
            const double x = g.lateral(i);
            const double R = g.lateral_radius();
            const double exact = oracle::integrate(
                [&](double y) { return normalization_constant(2) * s / (s * s + (x - y) * (x - y)) / (1 + y * y); },
                -R, R, 1e-13);
            err = std::max(err, std::abs(out(i) - exact));
        }
        if (r > 0) CHECK(err < prev / 3.0);
        prev = err;
    }
}

TEST_CASE("reference half-space convolution", "[quadrature]") {
    const double t = 0.25;
    const HalfSpaceGrid g(2, 5.0, 2.0, 21, 401);
    const auto one = Field::sample(g, [](double, double) { return 1.0; }, FarField::constant(1.0));
    const double r = 0.5 / std::sqrt(t);
    const auto tail = [&](double xp, double xn) {
        const double R = g.lateral_radius(), L = g.depth();
        const double lat = 0.5 * (std::erf((R - xp) * r) + std::erf((R + xp) * r));
        const double dep = 0.5 * (std::erf((L - xn) * r) + std::erf(xn * r)) - 0.5 * (std::erf((L + xn) * r) - std::erf(xn * r));
        return std::erf(xn * r) - lat * dep;
    };
    const auto kernel = [t](double x1, double x2, double y1, double y2) {
        if (y2 <= 0) return 0.0;
        KernelPoint<double> p{Eigen::Vector2d(x1, x2), Eigen::Vector2d(y1, y2), t};
        return dirichlet_heat_kernel(p);
    };
    const Field out = convolve_halfspace(kernel, one, tail);
    const auto [i, k] = g.nearest(0.0, 1.0);
    CHECK_THAT(out(k, i), WithinAbs(std::erf(1.0), 1e-5));
    CHECK(sup_norm(out) <= 1.0 + 1e-6);
    CHECK(sup_norm(convolve_halfspace(kernel, Field(g), tail)) == 0.0);
}

TEST_CASE("stencil cache is shared and bounded", "[quadrature]") {
    StencilCache cache(4);
    const auto a = cache.cauchy(0.5, 0.1, 11);
    const auto b = cache.cauchy(0.5, 0.1, 11);
    CHECK(a.get() == b.get());
    CHECK(cache.cauchy_rate(0.5, 0.1, 11).get() != a.get());
    for (int i = 0; i < 10; ++i) cache.cauchy(1.0 + i, 0.1, 11);
    CHECK(cache.size() <= 4);
    CHECK_THROWS_AS(cache.cauchy(0.0, 0.1, 11), DomainError);
}
