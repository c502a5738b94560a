#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "dynbc/grid.hpp"

using namespace dynbc;
using Catch::Matchers::WithinAbs;

TEST_CASE("grid construction and indexing", "[grid]") {
    const HalfSpaceGrid g(2, 4.0, 2.0, 17, 9);
    CHECK(g.lateral(g.center()) == 0.0);
    CHECK(g.depth_at(0) == 0.0);
    CHECK(g.lateral_step() == 0.5);
    CHECK(g.depth_step() == 0.25);
    for (int i = 0; i < g.n_lateral(); ++i)
        for (int k = 0; k < g.n_depth(); ++k) CHECK(g.nearest(g.lateral(i), g.depth_at(k)) == std::pair{i, k});
    CHECK_THROWS_AS(HalfSpaceGrid(2, 1.0, 1.0, 4, 5), DomainError);
    CHECK_THROWS_AS(HalfSpaceGrid(2, 1.0, 1.0, 5, 1), DomainError);
    CHECK_THROWS_AS(HalfSpaceGrid(3, 1.0, 1.0, 5, 5), DomainError);
    CHECK_THROWS_AS(HalfSpaceGrid(2, -1.0, 1.0, 5, 5), DomainError);
}

TEST_CASE("sup norms", "[grid]") {
    const HalfSpaceGrid g(2, 2.0, 1.0, 9, 5);
    CHECK(sup_norm(Field(g)) == 0.0);
    Field f(g);
    f.values()(1, 2) = -3.0;
    f.values()(3, 4) = 2.0;
    CHECK(sup_norm(f) == 3.0);
    const auto b = BoundaryField::sample(g, [](double x) { return std::exp(-x * x); });
    CHECK(sup_norm(b) == 1.0);

    const auto lin = Field::sample(g, [](double, double y) { return y; });
    CHECK(strip_sup_norm(lin, 0.5) == 0.25);
    CHECK(strip_sup_norm(Field(g), 0.5) == 0.0);
    CHECK(strip_sup_norm(lin, 0.6) <= sup_norm(lin));
    CHECK_THROWS_AS(strip_sup_norm(lin, 2.0), DomainError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int n = 0; n < 20; ++n) {
        const auto a = Field::sample(g, [&](double, double) { return u(rng); });
        const auto c = Field::sample(g, [&](double, double) { return u(rng); });
        CHECK(sup_norm(a + c) <= sup_norm(a) + sup_norm(c));
        CHECK_THAT(sup_norm(-2.5 * a), WithinAbs(2.5 * sup_norm(a), 1e-15));
    }
}

TEST_CASE("boundary normal derivative", "[grid]") {
    const HalfSpaceGrid g(2, 1.0, 1.0, 5, 9);
    auto d1 = boundary_normal_derivative(Field::sample(g, [](double, double y) { return y; }));
    auto d2 = boundary_normal_derivative(Field::sample(g, [](double, double y) { return y * y; }));
    for (int i = 0; i < g.n_lateral(); ++i) {
        CHECK_THAT(d1(i), WithinAbs(1.0, 1e-13));
        CHECK_THAT(d2(i), WithinAbs(0.0, 1e-13));
    }
    double prev = 1.0;
    for (int r = 0; r < 4; ++r) {
        const HalfSpaceGrid gr(2, 1.0, 1.0, 5, 8 * (1 << r) + 1);
        const double err = std::abs(boundary_normal_derivative(Field::sample(gr, [](double, double y) { return std::sin(y); }))(0) - 1.0);
        CHECK(err < prev / 3.5);
        prev = err;
    }
    CHECK_THROWS_AS(boundary_normal_derivative(Field(HalfSpaceGrid(2, 1.0, 1.0, 5, 3))), DomainError);
}

TEST_CASE("far-field profiles", "[grid]") {
    FarField f = FarField::constant(2.0);
    CHECK(f.value(0.0) == 2.0);
    const FarField g = f.diffused(0.25);
    CHECK_THAT(g.value(1.0), WithinAbs(2.0 * std::erf(1.0), 1e-15));
    CHECK(g.diffused(0.75).layers().front().time == 1.0);
    CHECK((f + (-1.0) * f).is_zero());
    CHECK((g + f).layers().size() == 2);
}

TEST_CASE("field csv round trip is exact", "[grid]") {
    const HalfSpaceGrid g(2, 3.0, 2.0, 7, 5);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd(0, 1e3);
    FarField far = FarField::constant(0.1) + FarField::constant(-0.3).diffused(1.0 / 3.0);
    const auto f = Field::sample(g, [&](double, double) { return nd(rng) / 7.0; }, far);
    std::stringstream ss;
    write_field_csv(ss, f);
    const Field back = read_field_csv(ss);
    CHECK(back.grid() == g);
    CHECK(back.values() == f.values());
    CHECK(back.far_field() == f.far_field());

    BoundaryFarField bfar(0.7);
    bfar.add_layer(2.5, 1.0 / 3.0);
    const auto b = BoundaryField::sample(g, [&](double) { return nd(rng) / 3.0; }, bfar);
    std::stringstream sb;
    write_field_csv(sb, b);
    const BoundaryField bb = read_boundary_csv(sb);
    CHECK(bb.values() == b.values());
    CHECK(bb.far_field() == bfar);

    std::stringstream bad("2,1,1,5\n");
    CHECK_THROWS_AS(read_field_csv(bad), DomainError);
}

TEST_CASE("fields reject non-finite values", "[grid]") {
    const HalfSpaceGrid g(2, 1.0, 1.0, 3, 2);
    Field::Matrix m = Field::Matrix::Zero(2, 3);
    m(1, 1) = std::nan("");
    CHECK_THROWS_AS(Field(g, m), DomainError);
    CHECK_THROWS_AS(Field(g, Field::Matrix::Zero(3, 3)), DomainError);
}
