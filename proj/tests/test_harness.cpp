#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dynbc/harness.hpp"

using namespace dynbc;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<RatePoint> power_law(double c, double p, const std::vector<double>& eps) {
    std::vector<RatePoint> out;
    for (double e : eps) out.push_back({e, c * std::pow(e, p)});
    return out;
}

const std::vector<double> kEps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

}  // namespace

TEST_CASE("rate fit on exact power laws", "[harness]") {
    const RateFit one = fit_rate(power_law(1.0, 1.0, kEps));
    CHECK_THAT(one.slope, WithinAbs(1.0, 1e-12));
    CHECK_THAT(one.intercept, WithinAbs(0.0, 1e-11));
    CHECK(one.residual < 1e-12);
    CHECK(one.points == 5);

    const RateFit half = fit_rate(power_law(2.0, 0.5, kEps));
    CHECK_THAT(half.slope, WithinAbs(0.5, 1e-12));
    CHECK_THAT(half.intercept, WithinAbs(std::log(2.0), 1e-11));
}

TEST_CASE("rate fit under multiplicative noise", "[harness]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    auto pts = power_law(3.0, 0.75, kEps);
    for (auto& p : pts) p.value *= std::exp(u(rng));
    const RateFit fit = fit_rate(pts);
    CHECK_THAT(fit.slope, WithinAbs(0.75, 0.02));
    CHECK(fit.residual <= 0.02);
}

TEST_CASE("rate fit drops unusable points", "[harness]") {
    auto pts = power_law(1.0, 0.5, kEps);
    pts[1].value = 0.0;
    pts[3].value = std::nan("");
    const RateFit fit = fit_rate(pts);
    CHECK(fit.points == 3);
    CHECK(fit.notes.size() == 2);
    CHECK_THAT(fit.slope, WithinAbs(0.5, 1e-12));
    pts[0].value = -1;
    CHECK_THROWS_AS(fit_rate(pts), DomainError);
    CHECK_THROWS_AS(fit_rate(power_law(1.0, 1.0, {0.1, 0.01})), DomainError);
}

TEST_CASE("functional assessment", "[harness]") {
    const std::vector<bool> all(5, true);
    CHECK(expected_band("lem24_dxn").lo == 0.60);
    CHECK(expected_band("cor_u_gap").hi == 0.65);
    CHECK_THROWS_AS(expected_band("nope"), DomainError);

    const auto pass = assess_functional("thm_b_strip", power_law(1.0, 0.5, kEps), all, 1e-9);
    CHECK(pass.status == "pass");
    CHECK(pass.monotone);
    REQUIRE(pass.fit);
    CHECK_THAT(pass.fit->slope, WithinAbs(0.5, 1e-12));

    const auto fail = assess_functional("thm_b_strip", power_law(1.0, 1.0, kEps), all, 1e-9);
    CHECK(fail.status == "fail");

    const auto lem = assess_functional("lem24_dxn", power_law(1.0, 0.75, kEps), all, 1e-9);
    CHECK(lem.status == "pass");

    // three smallest eps below the floor leave two usable points
    const auto floored = assess_functional("d_eps_norm", power_law(1.0, 0.5, kEps), all, 0.12);
    CHECK(floored.status == "below floor");
    CHECK(floored.point_status[0] == "ok");
    CHECK(floored.point_status[4] == "below floor");
    CHECK_FALSE(floored.fit);

    std::vector<bool> gaps(5, false);
    gaps[0] = gaps[1] = true;
    const auto missing = assess_functional("thm_c_wgap", power_law(1.0, 0.5, kEps), gaps, 1e-9);
    CHECK(missing.status == "insufficient points");
    CHECK(missing.point_status[2] == "missing");

    auto bumpy = power_law(1.0, 0.5, kEps);
    bumpy[2].value *= 2;
    CHECK_FALSE(assess_functional("cor_u_gap", bumpy, all, 1e-9).monotone);

    RateReport rep;
    rep.functionals = {pass, floored};
    CHECK(rep.bands_pass());
    CHECK_FALSE(rep.insufficient());
    rep.functionals.push_back(missing);
    CHECK_FALSE(rep.bands_pass());
    CHECK(rep.insufficient());
    rep.functionals = {fail};
    CHECK_FALSE(rep.bands_pass());
}

TEST_CASE("sweep plan validation", "[harness]") {
    SweepPlan plan;
    CHECK_NOTHROW(plan.validate());
    const auto w = window_times(plan);
    REQUIRE(w.size() == 5);
    CHECK(w.front() == plan.tau1);
    CHECK_THAT(w.back(), WithinAbs(plan.tau2, 1e-15));

    auto broken = [](auto edit) {
        SweepPlan p;
        edit(p);
        return p;
    };
    CHECK_THROWS_AS(broken([](SweepPlan& p) { p.eps_values = {0.1, 0.2}; }).validate(), DomainError);
    CHECK_THROWS_AS(broken([](SweepPlan& p) { p.eps_values = {1.0}; }).validate(), DomainError);
    CHECK_THROWS_AS(broken([](SweepPlan& p) { p.tau2 = 0.7; }).validate(), DomainError);
    CHECK_THROWS_AS(broken([](SweepPlan& p) { p.functionals = {"strip"}; }).validate(), DomainError);
    CHECK_THROWS_AS(broken([](SweepPlan& p) { p.functionals.clear(); }).validate(), DomainError);
    CHECK_THROWS_AS(broken([](SweepPlan& p) { p.window_samples = 1; }).validate(), DomainError);
}

TEST_CASE("sweep of boundary-layer functionals", "[harness]") {
    SweepPlan plan;
    plan.grid.n_lateral = 33;
    plan.grid.n_depth = 17;
    plan.functionals = {"d_eps_norm"};
    plan.eps_values = {1e-1, 1e-2, 1e-3};
    const RateReport a = run_sweep(plan);
    REQUIRE(a.runs.size() == 3);
    REQUIRE(a.functionals.size() == 1);
    for (const auto& r : a.runs) {
        CHECK(r.solved);
        CHECK(r.values.size() == 1);
        CHECK(r.values[0] > 0);
    }
    CHECK(a.runs[2].values[0] < a.runs[0].values[0]);
    CHECK(format_report(a) == format_report(run_sweep(plan)));
}

TEST_CASE("lemma suite is deterministic", "[harness]") {
    SuiteConfig cfg;
    cfg.instances = 5;
    const SuiteReport a = run_lemma_suite(cfg);
    const SuiteReport b = run_lemma_suite(cfg);
    CHECK_FALSE(a.entries.empty());
    CHECK(format_suite(a) == format_suite(b));
    cfg.seed += 1;
    CHECK(format_suite(run_lemma_suite(cfg)) != format_suite(a));
}
