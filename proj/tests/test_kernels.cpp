#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "dynbc/kernels.hpp"
#include "support/oracles.hpp"

using namespace dynbc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

KernelPoint<double> point(double x1, double x2, double y1, double y2, double t) {
    KernelPoint<double> p;
    p.x = Eigen::Vector2d(x1, x2);
    p.y = Eigen::Vector2d(y1, y2);
    p.t = t;
    return p;
}

const double pi = std::numbers::pi;

}  // namespace

TEST_CASE("gauss kernel closed form", "[kernels]") {
    CHECK_THAT(gauss_kernel_1d(0.0, 1.0 / (4.0 * pi)), WithinRel(1.0, 1e-15));
    CHECK_THAT(gauss_kernel_1d(2.0, 1.0), WithinRel(std::exp(-1.0) / std::sqrt(4.0 * pi), 1e-15));
    CHECK_THAT(gauss_kernel(Eigen::Vector2d(0.0, 0.0), 1.0), WithinRel(1.0 / (4.0 * pi), 1e-15));
    const double mass = oracle::integrate_line([](double z) { return gauss_kernel_1d(z, 1.0); });
    CHECK_THAT(mass, WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(gauss_kernel_1d(0.0, 0.0), DomainError);
    CHECK_THROWS_AS(gauss_kernel(Eigen::Vector2d(0.0, 0.0), -1.0), DomainError);
}

TEST_CASE("Dirichlet heat kernel", "[kernels]") {
    CHECK(dirichlet_heat_kernel(point(0, 0, 0, 1, 1)) == 0.0);
    CHECK_THAT(dirichlet_heat_kernel(point(0, 1, 0, 1, 1)), WithinRel((1.0 - std::exp(-1.0)) / (4.0 * pi), 1e-14));
    CHECK_THROWS_AS(dirichlet_heat_kernel(point(0, 1, 0, 0, 1)), DomainError);
    CHECK_THROWS_AS(dirichlet_heat_kernel(point(0, -0.1, 0, 1, 1)), DomainError);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lat(-3, 3), dep(0.01, 3), tm(0.01, 10);
    for (int n = 0; n < 200; ++n) {
        const auto p = point(lat(rng), dep(rng), lat(rng), dep(rng), tm(rng));
        const auto q = point(p.y(0), p.y(1), p.x(0), p.x(1), p.t);
        const double g = dirichlet_heat_kernel(p);
        CHECK(g >= 0.0);
        CHECK_THAT(dirichlet_heat_kernel(q), WithinRel(g, 1e-12));
        // unfactored closed form
        const double direct = (std::exp(-(p.x - p.y).squaredNorm() / (4 * p.t)) -
                               std::exp(-std::pow(p.x(0) - p.y(0), 2) / (4 * p.t) -
                                        std::pow(p.x(1) + p.y(1), 2) / (4 * p.t))) /
                              (4 * pi * p.t);
        const double lateral = gauss_kernel_1d(p.x(0) - p.y(0), p.t);
        CHECK(std::abs(g - direct) <= 1e-14 * lateral);
    }
}

TEST_CASE("K matches central differences with second-order trend", "[kernels]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lat(-2, 2), dep(0.2, 2), tm(0.1, 3);
    for (int n = 0; n < 20; ++n) {
        const auto p = point(lat(rng), dep(rng), lat(rng), dep(rng), tm(rng));
        const double k = dirichlet_kernel_dxn(p);
        double prev = 0;
        for (int r = 0; r < 3; ++r) {
            const double h = 1e-2 / (1 << r);
            auto up = p, dn = p;
            up.x(1) += h;
            dn.x(1) -= h;
            const double err = std::abs((dirichlet_heat_kernel(up) - dirichlet_heat_kernel(dn)) / (2 * h) - k);
            if (r > 0 && prev > 1e-11) CHECK(err < prev / 3.0);
            prev = err;
        }
    }
    // at x_N = 0 the two Gaussians coincide
    const auto p = point(0.3, 0.0, -0.2, 0.7, 0.5);
    CHECK_THAT(dirichlet_kernel_dxn(p),
               WithinRel(gauss_kernel_1d(0.5, 0.5) * (0.7 / 0.5) * gauss_kernel_1d(0.7, 0.5), 1e-14));
}

TEST_CASE("integral of |K| over the half-space", "[kernels]") {
    for (double t : {0.1, 1.0, 4.0}) {
        for (double xn : {0.0, 0.3, 1.5}) {
            // lateral factor integrates to one; depth factor by adaptive quadrature
            auto depth = [&](double yn) {
                if (yn <= 0) return 0.0;
                return std::abs(-((xn - yn) / (2 * t)) * gauss_kernel_1d(xn - yn, t) +
                                ((xn + yn) / (2 * t)) * gauss_kernel_1d(xn + yn, t));
            };
            const double total = oracle::integrate(depth, 0.0, xn + 1e-300, 1e-13) +
                                 oracle::integrate_to_inf(depth, xn, 1e-13);
            const double bound = 1.0 / std::sqrt(pi * t);
            CHECK(total <= bound * (1 + 1e-9));
            if (xn == 0.0) CHECK_THAT(total, WithinRel(bound, 1e-9));
        }
    }
}

TEST_CASE("normalization constants", "[kernels]") {
    const double c2 = normalization_constant(2);
    const double c3 = normalization_constant(3);
    const double m2 = oracle::integrate_line([](double z) { return 1.0 / (1.0 + z * z); });
    const double m3 = 2 * pi * oracle::integrate_to_inf([](double r) { return r * std::pow(1 + r * r, -1.5); }, 0.0);
    CHECK_THAT(c2, WithinRel(1.0 / m2, 1e-10));
    CHECK_THAT(c3, WithinRel(1.0 / m3, 1e-10));
    CHECK_THAT(c2, WithinAbs(0.3183098862, 1e-10));
    CHECK_THAT(c3, WithinAbs(0.1591549431, 1e-10));
    CHECK_THROWS_AS(normalization_constant(1), DomainError);

    std::vector<double> seen(8);
    std::vector<std::thread> pool;
    for (int i = 0; i < 8; ++i) pool.emplace_back([&, i] { seen[i] = normalization_constant(4); });
    for (auto& th : pool) th.join();
    for (double v : seen) CHECK(v == seen[0]);
}

TEST_CASE("Poisson kernel and its time derivative", "[kernels]") {
    const double c2 = normalization_constant(2);
    const Eigen::Matrix<double, 1, 1> zero(0.0);
    CHECK_THAT(poisson_dyn_kernel(zero, 0.0, 1.0), WithinRel(c2, 1e-15));
    CHECK_THAT(poisson_dyn_kernel_dt(zero, 0.0, 1.0), WithinRel(-c2, 1e-15));
    CHECK_THROWS_AS(poisson_dyn_kernel(zero, 0.0, 0.0), DomainError);

    for (auto [xn, t] : {std::pair{0.5, 2.0}, {0.0, 0.1}, {3.0, 0.01}}) {
        const double m = oracle::integrate_line(
            [&](double z) { return poisson_dyn_kernel(Eigen::Matrix<double, 1, 1>(z), xn, t); }, 1e-13);
        CHECK_THAT(m, WithinAbs(1.0, 1e-10));
    }
    // N = 3, radial
    for (double s : {0.2, 1.0, 7.0}) {
        const double m = 2 * pi * oracle::integrate_to_inf([&](double r) { return r * poisson_dyn_kernel_radial(3, r, s); }, 0.0, 1e-13);
        CHECK_THAT(m, WithinAbs(1.0, 1e-10));
    }
    // translation structure and sign change
    for (double z : {0.0, 0.4, 2.0}) {
        const Eigen::Matrix<double, 1, 1> x(z);
        CHECK_THAT(poisson_dyn_kernel(x, 0.3, 0.7), WithinRel(poisson_dyn_kernel(x, 0.0, 1.0), 1e-15));
    }
    CHECK(poisson_dyn_kernel_dt(Eigen::Matrix<double, 1, 1>(0.9), 0.25, 0.75) < 0.0);
    CHECK(poisson_dyn_kernel_dt(Eigen::Matrix<double, 1, 1>(1.1), 0.25, 0.75) > 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lat(-5, 5), pos(0.0, 3.0), tm(0.05, 3.0);
    for (int n = 0; n < 100; ++n) {
        const Eigen::Matrix<double, 1, 1> x(lat(rng));
        const double xn = pos(rng), t = tm(rng);
        CHECK(std::abs(poisson_dyn_kernel_dt(x, xn, t)) <= poisson_dyn_kernel(x, xn, t) / (xn + t) * (1 + 1e-14));
        double prev = 0;
        for (int r = 0; r < 3; ++r) {
            const double h = 1e-2 * t / (1 << r);
            const double fd = (poisson_dyn_kernel(x, xn, t + h) - poisson_dyn_kernel(x, xn, t - h)) / (2 * h);
            const double err = std::abs(fd - poisson_dyn_kernel_dt(x, xn, t));
            if (r > 0 && prev > 1e-10) CHECK(err < prev / 3.0);
            prev = err;
        }
    }
    for (int n = 0; n < 50; ++n) {
        const Eigen::Vector2d x(lat(rng), lat(rng));
        const double s = tm(rng);
        CHECK(std::abs(poisson_dyn_kernel_dt(x, 0.0, s)) <= 2.0 * poisson_dyn_kernel(x, 0.0, s) / s * (1 + 1e-14));
    }
}
