#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "dynbc/duhamel_ops.hpp"
#include "dynbc/kernels.hpp"
#include "dynbc/semigroups.hpp"
#include "support/oracles.hpp"

using namespace dynbc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// d/ds of c2 s / (s^2 + z^2)
double cauchy_rate(double z, double s) { return (z * z - s * s) / (std::numbers::pi * (s * s + z * z) * (s * s + z * z)); }

BoundaryField cauchy_datum(const HalfSpaceGrid& g) {
    BoundaryFarField far;
    far.add_layer(std::numbers::pi, 1.0);
    return BoundaryField::sample(g, [](double x) { return 1.0 / (1 + x * x); }, far);
}

}  // namespace

TEST_CASE("h factor", "[duhamel]") {
    CHECK_THAT(h_factor(1.0, 16.0), WithinRel(2.0, 1e-15));
    CHECK_THAT(h_factor(0.0625, 1.0), WithinRel(8.0, 1e-15));
    CHECK_THAT(h_factor(4.0, 123.0), WithinRel(0.5, 1e-15));
    CHECK_THROWS_AS(h_factor(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(h_factor(1.0, 0.0), DomainError);
}

TEST_CASE("F1 on trivial and exact data", "[duhamel]") {
    const HalfSpaceGrid g(2, 8.0, 4.0, 65, 17);
    CHECK(sup_norm(f1_eval(BoundaryField(g), 0.3)) == 0.0);
    const BoundaryField one(g, Eigen::VectorXd::Ones(g.n_lateral()), BoundaryFarField(1.0));
    CHECK(sup_norm(f1_eval(one, 0.3)) < 1e-6);
    CHECK_THROWS_AS(f1_eval(one, 0.0), DomainError);

    // a Poisson layer is carried exactly by the far field
    const Field f = f1_eval(cauchy_datum(g), 0.4);
    for (int k = 0; k < g.n_depth(); ++k)
        for (int i = 0; i < g.n_lateral(); ++i)
            CHECK_THAT(f(k, i), WithinAbs(std::numbers::pi * cauchy_rate(g.lateral(i), 1.4 + g.depth_at(k)), 1e-13));
}

TEST_CASE("F1 lattice convolution against adaptive quadrature", "[duhamel]") {
    const HalfSpaceGrid g(2, 10.0, 2.0, 801, 5);
    auto psi = [](double y) { return std::exp(-y * y) * (1 + 0.3 * y); };
    const Field f = f1_eval(BoundaryField::sample(g, psi), 0.2);
    for (double x : {0.0, 0.5, -1.25, 3.0})
        for (double xn : {0.0, 0.5, 2.0}) {
            const double s = xn + 0.2;
            const double ref = oracle::integrate_line([&](double y) { return cauchy_rate(x - y, s) * psi(y); });
            const auto [i, k] = g.nearest(x, xn);
            CHECK_THAT(f(k, i), WithinAbs(ref, 2e-4 * (1 + std::abs(ref))));
        }
}

TEST_CASE("F1 obeys the 1/(y_N + s) bound", "[duhamel]") {
    const HalfSpaceGrid g(2, 8.0, 4.0, 129, 17);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int rep = 0; rep < 5; ++rep) {
        const auto psi = BoundaryField::sample(g, [&](double) { return u(rng); });
        const double bound = sup_norm(psi);
        for (double s : {1e-3, 0.05, 1.0, 20.0}) {
            const Field f = f1_eval(psi, s);
            for (int k = 0; k < g.n_depth(); ++k) {
                const double row = f.values().row(k).cwiseAbs().maxCoeff();
                CHECK(row <= bound / (g.depth_at(k) + s) * (1 + 1e-6));
            }
        }
    }
}

TEST_CASE("F2 on zero and constant traces", "[duhamel]") {
    const HalfSpaceGrid g(2, 8.0, 4.0, 65, 17);
    const TraceFn zero = [&](double) { return BoundaryField(g); };
    CHECK(sup_norm(f2_eval(zero, 0.5)) == 0.0);
    const TraceFn flat = [&](double s) {
        const double c = 1.0 / std::sqrt(s);
        return BoundaryField(g, Eigen::VectorXd::Constant(g.n_lateral(), c), BoundaryFarField(c));
    };
    // constants have no rate, so only the instantaneous part survives
    const F2Split parts = f2_split(flat, 0.25);
    CHECK(sup_norm(parts.memory) < 1e-12);
    CHECK_THAT(sup_norm(parts.instantaneous), WithinAbs(2.0, 1e-9));
}

TEST_CASE("F2 memory integral against a 1-D oracle", "[duhamel]") {
    const HalfSpaceGrid g(2, 8.0, 4.0, 65, 9);
    const BoundaryField layer = cauchy_datum(g);
    const TraceFn trace = [&](double s) { return (1.0 / std::sqrt(s)) * layer; };
    for (double t : {0.05, 0.5, 2.0}) {
        const BoundaryField m = f2_memory(trace, t);
        for (int i : {0, 20, 32, 50}) {
            const double x = g.lateral(i);
            const double ref = oracle::integrate(
                [&](double r) { return std::numbers::pi * cauchy_rate(x, 1 + t - r) / std::sqrt(r); }, 0.0, t, 1e-13);
            CHECK_THAT(m(i), WithinAbs(ref, 1e-7 * (1 + std::abs(ref))));
        }
    }
}

TEST_CASE("F2 parts obey their bounds", "[duhamel]") {
    const HalfSpaceGrid g(2, 8.0, 2.0, 129, 33);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto shape = BoundaryField::sample(g, [&](double x) { return std::exp(-x * x) * (1 + 0.5 * u(rng)); });
    const TraceFn trace = [&](double s) { return (1.0 / std::sqrt(s)) * shape; };
    const double t = 0.5;
    const F2Split parts = f2_split(trace, t);
    CHECK(sup_norm(parts.instantaneous) <= sup_norm(trace(t)) * (1 + 1e-9));

    // |F2''| <= C x_N^{-3/4} t^{1/4} near the boundary, one C for all depths
    double c = 0;
    for (int k = 1; k < g.n_depth(); ++k) {
        const double xn = g.depth_at(k);
        if (xn > 1.0) break;
        c = std::max(c, parts.memory.values().row(k).cwiseAbs().maxCoeff() / h_factor(xn, t));
    }
    const double beta = std::tgamma(0.75) * std::tgamma(0.5) / std::tgamma(1.25);
    CHECK(c > 0);
    CHECK(c < 10 * beta * sup_norm(shape));
}

TEST_CASE("D_eps vanishes on trivial data and is linear", "[duhamel]") {
    const HalfSpaceGrid g(2, 6.0, 4.0, 33, 17);
    CHECK(sup_norm(d_eps_eval(BoundaryField(g), 0.1, 0.3)) == 0.0);
    const BoundaryField one(g, Eigen::VectorXd::Ones(g.n_lateral()), BoundaryFarField(1.0));
    CHECK(sup_norm(d_eps_eval(one, 0.1, 0.3)) < 1e-6);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto a = BoundaryField::sample(g, [&](double) { return u(rng); });
    const auto b = BoundaryField::sample(g, [&](double) { return u(rng); });
    const Field lhs = d_eps_eval(2.0 * a + b, 0.1, 0.3);
    const Field rhs = 2.0 * d_eps_eval(a, 0.1, 0.3) + d_eps_eval(b, 0.1, 0.3);
    CHECK((lhs.values() - rhs.values()).cwiseAbs().maxCoeff() < 1e-12 * (1 + sup_norm(lhs)));
}

TEST_CASE("D_eps under time-node doubling", "[duhamel]") {
    const HalfSpaceGrid g(2, 8.0, 4.0, 65, 33);
    const BoundaryField psi = cauchy_datum(g);
    for (double eps : {0.1, 0.01}) {
        const FieldWithDxn coarse = d_eps_with_dxn(psi, eps, 0.5, TimeQuadRule(64, 0.25, 0.5));
        const FieldWithDxn fine = d_eps_with_dxn(psi, eps, 0.5, TimeQuadRule(128, 0.25, 0.5));
        CHECK(sup_norm(coarse.value - fine.value) < 1e-5 * (1 + sup_norm(fine.value)));
        CHECK(sup_norm(coarse.dxn - fine.dxn) < 1e-4 * (1 + sup_norm(fine.dxn)));
        CHECK(sup_norm(fine.value.trace()) == 0.0);
    }
}

TEST_CASE("D_eps tilde vanishes on a zero trace and is linear", "[duhamel]") {
    const HalfSpaceGrid g(2, 6.0, 4.0, 33, 17);
    const TraceFn zero = [&](double) { return BoundaryField(g); };
    const FieldWithDxn z = d_eps_tilde_eval(zero, 0.1, 0.2);
    CHECK(sup_norm(z.value) == 0.0);
    CHECK(sup_norm(z.dxn) == 0.0);

    const auto a = BoundaryField::sample(g, [](double x) { return std::exp(-x * x); });
    const auto b = BoundaryField::sample(g, [](double x) { return std::sin(x) / (1 + x * x); });
    const TraceFn ta = [&](double s) { return (1.0 / std::sqrt(s)) * a; };
    const TraceFn tb = [&](double s) { return (1.0 / std::sqrt(s)) * b; };
    const TraceFn tab = [&](double s) { return (1.0 / std::sqrt(s)) * (a - 3.0 * b); };
    const Field lhs = d_eps_tilde_eval(tab, 0.1, 0.2).value;
    const Field rhs = d_eps_tilde_eval(ta, 0.1, 0.2).value - 3.0 * d_eps_tilde_eval(tb, 0.1, 0.2).value;
    CHECK(sup_norm(lhs - rhs) < 1e-12 * (1 + sup_norm(lhs)));
}
