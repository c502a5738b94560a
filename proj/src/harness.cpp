#include "dynbc/harness.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

#include "dynbc/duhamel_ops.hpp"
#include "dynbc/kernels.hpp"
#include "dynbc/rules.hpp"
#include "dynbc/semigroups.hpp"

namespace dynbc {

using json = nlohmann::ordered_json;

// ================================================================ rate fits

RateFit fit_rate(const std::vector<RatePoint>& points) {
    RateFit fit;
    std::vector<double> X, Y;
    for (const RatePoint& p : points) {
        if (!(p.eps > 0) || !(p.value > 0) || !std::isfinite(p.value)) {
            std::ostringstream msg;
            msg << "excluded eps " << p.eps << " with value " << p.value;
            fit.notes.push_back(msg.str());
            continue;
        }
        X.push_back(std::log(p.eps));
        Y.push_back(std::log(p.value));
    }
    if (X.size() < 3) throw DomainError("fit_rate: need at least 3 positive points");
    const int n = static_cast<int>(X.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        A(i, 0) = X[i];
        A(i, 1) = 1.0;
        b(i) = Y[i];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    fit.slope = c(0);
    fit.intercept = c(1);
    fit.residual = std::sqrt((A * c - b).squaredNorm() / n);
    fit.points = n;
    return fit;
}

// ==================================================================== sweep

const std::vector<std::string>& functional_names() {
    static const std::vector<std::string> names{"thm_b_strip", "thm_c_wgap", "cor_u_gap", "lem24_dxn",
                                                "d_eps_norm"};
    return names;
}

SlopeBand expected_band(const std::string& f) {
    if (f == "lem24_dxn") return {0.60, 0.90};
    if (f == "thm_b_strip" || f == "thm_c_wgap" || f == "cor_u_gap" || f == "d_eps_norm") return {0.35, 0.65};
    throw DomainError("unknown functional '" + f + "'");
}

void SweepPlan::validate() const {
    if (eps_values.empty()) throw DomainError("sweep: no eps values");
    for (std::size_t i = 0; i < eps_values.size(); ++i) {
        if (!(eps_values[i] > 0 && eps_values[i] < 1)) throw DomainError("sweep: eps values must lie in (0, 1)");
        if (i > 0 && !(eps_values[i] < eps_values[i - 1])) throw DomainError("sweep: eps values must decrease");
    }
    if (!(horizon > 0)) throw DomainError("sweep: horizon must be positive");
    if (!(tau1 > 0 && tau1 < tau2 && tau2 <= horizon)) throw DomainError("sweep: need 0 < tau1 < tau2 <= horizon");
    if (window_samples < 2) throw DomainError("sweep: window_samples must be at least 2");
    if (!(K_lateral > 0) || !(K_depth > 0)) throw DomainError("sweep: K must have positive extent");
    if (!(L_strip > 0)) throw DomainError("sweep: L_strip must be positive");
    if (!(t_small > 0)) throw DomainError("sweep: t_small must be positive");
    if (!(quad_tol > 0)) throw DomainError("sweep: quad_tol must be positive");
    if (functionals.empty()) throw DomainError("sweep: no functionals requested");
    for (const std::string& f : functionals) expected_band(f);
}

std::vector<double> window_times(const SweepPlan& plan) {
    std::vector<double> t;
    for (int j = 0; j < plan.window_samples; ++j)
        t.push_back(plan.tau1 + (plan.tau2 - plan.tau1) * j / (plan.window_samples - 1));
    return t;
}

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool needs_solver(const std::string& f) { return f == "thm_b_strip" || f == "thm_c_wgap" || f == "cor_u_gap"; }

// sup over K of |f|
double k_sup(const Field& f, double K_lateral, double K_depth) {
    const HalfSpaceGrid& g = f.grid();
    double m = 0;
    for (int i = 0; i < g.n_lateral(); ++i) {
        if (std::abs(g.lateral(i)) > K_lateral * (1 + 1e-12)) continue;
        for (int k = 0; k < g.n_depth() && g.depth_at(k) <= K_depth * (1 + 1e-12); ++k)
            m = std::max(m, std::abs(f(k, i)));
    }
    return m;
}

// lem24_dxn and d_eps_norm from D_eps alone
std::map<std::string, double> d_eps_functionals(const SweepPlan& plan, const ProblemSpec& spec) {
    double dxn = 0, norm = 0;
    for (double t : interval_times(plan.horizon, plan.solver)) {
        const FieldWithDxn d = d_eps_with_dxn(spec.phi_b, spec.eps, t, plan.solver.d_rule);
        dxn = std::max(dxn, std::pow(t, 0.25) * sup_norm(d.dxn));
        if (t <= plan.t_small * (1 + 1e-12)) norm = std::max(norm, sup_norm(d.value) / std::pow(t, 0.25));
    }
    return {{"lem24_dxn", dxn}, {"d_eps_norm", norm}};
}

}  // namespace

std::vector<double> evaluate_functionals(const SweepPlan& plan, const ProblemSpec& spec, const SolverRun& run) {
    std::map<std::string, double> val;
    bool want_d = false, want_solver = false;
    for (const std::string& f : plan.functionals) (needs_solver(f) ? want_solver : want_d) = true;
    if (want_solver && run.complete && !run.times.empty()) {
        double strip = 0, wgap = 0, ugap = 0;
        for (std::size_t j = 0; j < run.times.size(); ++j) {
            const double t = run.times[j];
            strip = std::max(strip, std::sqrt(t) * strip_sup_norm(run.v[j], std::min(plan.L_strip, run.v[j].grid().depth())));
            // the Poisson extension attains its sup on the boundary
            wgap = std::max(wgap, sup_norm(run.w_memory[j]));
            if (t >= plan.tau1 * (1 - 1e-12) && t <= plan.tau2 * (1 + 1e-12)) {
                const Field gap = run.v[j] + poisson_extension(run.w_memory[j]);
                ugap = std::max(ugap, k_sup(gap, plan.K_lateral, plan.K_depth));
            }
        }
        val["thm_b_strip"] = strip;
        val["thm_c_wgap"] = wgap;
        val["cor_u_gap"] = ugap;
    }
    if (want_d) {
        const auto d = d_eps_functionals(plan, spec);
        val.insert(d.begin(), d.end());
    }
    std::vector<double> out;
    for (const std::string& f : plan.functionals) {
        auto it = val.find(f);
        out.push_back(it == val.end() ? kMissing : it->second);
    }
    return out;
}

FunctionalReport assess_functional(const std::string& name, const std::vector<RatePoint>& points,
                                   const std::vector<bool>& present, double floor) {
    FunctionalReport r;
    r.name = name;
    r.band = expected_band(name);
    r.points = points;
    r.floor = floor;
    std::vector<RatePoint> usable;
    bool any_floor = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!present[i] || !std::isfinite(points[i].value)) {
            r.point_status.push_back("missing");
        } else if (points[i].value < floor) {
            r.point_status.push_back("below floor");
            any_floor = true;
        } else {
            r.point_status.push_back("ok");
            usable.push_back(points[i]);
        }
    }
    double prev = kMissing;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (r.point_status[i] == "missing") continue;
        if (std::isfinite(prev) && points[i].value > prev * 1.1 && points[i].value >= floor) r.monotone = false;
        prev = points[i].value;
    }
    if (usable.size() >= 3) {
        r.fit = fit_rate(usable);
        r.status = r.fit->slope >= r.band.lo && r.fit->slope <= r.band.hi ? "pass" : "fail";
    } else {
        r.status = any_floor ? "below floor" : "insufficient points";
    }
    return r;
}

bool RateReport::bands_pass() const {
    return std::all_of(functionals.begin(), functionals.end(),
                       [](const FunctionalReport& f) { return f.status == "pass" || f.status == "below floor"; });
}

bool RateReport::insufficient() const {
    return std::any_of(functionals.begin(), functionals.end(),
                       [](const FunctionalReport& f) { return f.status == "insufficient points"; });
}

RateReport run_sweep(const SweepPlan& plan) {
    plan.validate();
    RateReport report;
    double scale = 0;
    for (double eps : plan.eps_values) {
        SweepPoint pt;
        pt.eps = eps;
        pt.grid = resolve_grid(plan.grid, plan.data, eps, plan.horizon, &pt.notes);
        const ProblemSpec spec = make_problem(plan.data, pt.grid, eps, plan.horizon);
        scale = std::max(scale, sup_norm(spec.phi) + sup_norm(spec.phi_b));
        SolverRun run;
        const bool want_solver = std::any_of(plan.functionals.begin(), plan.functionals.end(), needs_solver);
        if (want_solver) {
            try {
                run = continue_global(prepare(spec), plan.horizon, plan.solver, window_times(plan));
            } catch (const std::exception& e) {
                run.complete = false;
                run.failure = e.what();
            }
            pt.solved = run.complete;
            pt.failure = run.failure;
            pt.T_star = run.T_star;
            pt.iterations = run.iterations;
            pt.smallest_time = run.times.empty() ? 0.0 : run.times.front();
        } else {
            pt.solved = true;
        }
        try {
            pt.values = evaluate_functionals(plan, spec, run);
        } catch (const std::exception& e) {
            pt.values.assign(plan.functionals.size(), kMissing);
            pt.notes.push_back(std::string("functional evaluation failed: ") + e.what());
        }
        report.runs.push_back(std::move(pt));
    }
    const double floor = 10 * plan.quad_tol * scale;
    for (std::size_t f = 0; f < plan.functionals.size(); ++f) {
        std::vector<RatePoint> pts;
        std::vector<bool> present;
        for (const SweepPoint& pt : report.runs) {
            pts.push_back({pt.eps, pt.values[f]});
            present.push_back(std::isfinite(pt.values[f]));
        }
        report.functionals.push_back(assess_functional(plan.functionals[f], pts, present, floor));
    }
    return report;
}

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_report(const RateReport& report) {
    json doc;
    doc["bands_pass"] = report.bands_pass();
    json runs = json::array();
    for (const SweepPoint& pt : report.runs) {
        json r;
        r["eps"] = pt.eps;
        r["solved"] = pt.solved;
        if (!pt.failure.empty()) r["failure"] = pt.failure;
        r["grid"] = {{"R_prime", pt.grid.lateral_radius()}, {"L", pt.grid.depth()},
                     {"n_lateral", pt.grid.n_lateral()}, {"n_depth", pt.grid.n_depth()}};
        r["T_star"] = pt.T_star;
        r["iterations"] = pt.iterations;
        r["smallest_time"] = pt.smallest_time;
        r["notes"] = pt.notes;
        runs.push_back(std::move(r));
    }
    doc["runs"] = std::move(runs);
    json fs = json::array();
    for (const FunctionalReport& f : report.functionals) {
        json j;
        j["name"] = f.name;
        j["band"] = {f.band.lo, f.band.hi};
        j["floor"] = f.floor;
        json pts = json::array();
        for (std::size_t i = 0; i < f.points.size(); ++i)
            pts.push_back({{"eps", f.points[i].eps}, {"value", num(f.points[i].value)}, {"status", f.point_status[i]}});
        j["points"] = std::move(pts);
        if (f.fit)
            j["fit"] = {{"slope", f.fit->slope},
                        {"intercept", f.fit->intercept},
                        {"residual", f.fit->residual},
                        {"points", f.fit->points}};
        else
            j["fit"] = nullptr;
        j["monotone"] = f.monotone;
        j["status"] = f.status;
        fs.push_back(std::move(j));
    }
    doc["functionals"] = std::move(fs);
    return doc.dump(2) + "\n";
}

// ============================================================= lemma suite

bool SuiteReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const SuiteEntry& e) { return e.pass; });
}

std::string format_suite(const SuiteReport& report) {
    json doc;
    doc["all_pass"] = report.all_pass();
    json es = json::array();
    for (const SuiteEntry& e : report.entries)
        es.push_back({{"name", e.name}, {"pass", e.pass}, {"margin", num(e.margin)}, {"detail", e.detail}});
    doc["entries"] = std::move(es);
    return doc.dump(2) + "\n";
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
double log_uniform(Rng& rng, double a, double b) { return std::exp(uniform(rng, std::log(a), std::log(b))); }

// observed <= bound
SuiteEntry bound_entry(std::string name, double observed, double bound, std::string detail = {}) {
    SuiteEntry e;
    e.name = std::move(name);
    e.pass = std::isfinite(observed) && observed <= bound;
    e.margin = bound != 0 ? (bound - observed) / std::abs(bound) : -observed;
    std::ostringstream d;
    d << "observed " << observed << " bound " << bound;
    if (!detail.empty()) d << "; " << detail;
    e.detail = d.str();
    return e;
}

// Smooth random datum: constant background plus a few bumps, sampled on any grid.
struct SmoothDatum {
    double background = 0;
    struct Bump {
        double a, cx, cy, w;
    };
    std::vector<Bump> bumps;

    // bump centres in [-X, X] x [y0, y1], widths in [w0, w1]
    static SmoothDatum draw(Rng& rng, double X, double y0, double y1, double w0 = 0.4, double w1 = 1.2) {
        SmoothDatum d;
        d.background = uniform(rng, -0.5, 0.5);
        const int n = 1 + static_cast<int>(rng() % 3);
        for (int j = 0; j < n; ++j)
            d.bumps.push_back({uniform(rng, -1, 1), uniform(rng, -X, X), uniform(rng, y0, y1), uniform(rng, w0, w1)});
        return d;
    }
    static SmoothDatum draw(Rng& rng, double R, double L) { return draw(rng, R / 2, 0.0, L); }
    double at(double x, double y) const {
        double v = background;
        for (const Bump& b : bumps) v += b.a * std::exp(-((x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy)) / (b.w * b.w));
        return v;
    }
    Field field(const HalfSpaceGrid& g) const {
        return Field::sample(g, [&](double x, double y) { return at(x, y); }, FarField::constant(background));
    }
    BoundaryField boundary(const HalfSpaceGrid& g) const {
        return BoundaryField::sample(g, [&](double x) { return at(x, 0.0); }, BoundaryFarField(background));
    }
};

HalfSpaceGrid refine(const HalfSpaceGrid& g) {
    return HalfSpaceGrid(g.dim(), g.lateral_radius(), g.depth(), 2 * g.n_lateral() - 1, 2 * g.n_depth() - 1);
}

// Calibrated constant on a grid and its refinement: C = max ratio, both grids.
void calibrated_pair(SuiteReport& rep, const std::string& name, const HalfSpaceGrid& coarse, double stability,
                     const std::function<double(const HalfSpaceGrid&)>& ratio, double known_bound = 0) {
    double Cc = kMissing, Cf = kMissing;
    try {
        Cc = ratio(coarse);
        Cf = ratio(refine(coarse));
    } catch (const std::exception& e) {
        rep.entries.push_back({name + " calibration", false, kMissing, e.what()});
        return;
    }
    if (known_bound > 0) rep.entries.push_back(bound_entry(name + " bound", std::max(Cc, Cf), known_bound));
    const double drift = std::abs(Cf / Cc - 1);
    std::ostringstream d;
    d << "C coarse " << Cc << " C refined " << Cf;
    SuiteEntry e = bound_entry(name + " constant stability", drift, stability, d.str());
    if (!(Cc > 0)) e.pass = false;
    rep.entries.push_back(e);
}

// Wraps a check so an exception becomes a failed entry.
void guarded(SuiteReport& rep, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        rep.entries.push_back({name, false, kMissing, std::string("exception: ") + e.what()});
    }
}

// --- kernels

void kernel_entries(SuiteReport& rep, Rng& rng) {
    guarded(rep, "kernel normalization", [&] {
        double err = 0;
        for (int N : {2, 3})
            for (int s = 0; s < 10; ++s) {
                const double xn = uniform(rng, 0, 2), t = log_uniform(rng, 1e-2, 10);
                const double sig = xn + t;
                double total = 0;
                const int panels = 16;
                for (int p = 0; p < panels; ++p) {
                    const double a = 0.5 * std::numbers::pi * p / panels, b = 0.5 * std::numbers::pi * (p + 1) / panels;
                    total += integrate_gl(
                        [&](double th) {
                            const double r = sig * std::tan(th), jac = sig / (std::cos(th) * std::cos(th));
                            const double P = poisson_dyn_kernel_radial(N, r, sig);
                            return N == 2 ? 2 * P * jac : 2 * std::numbers::pi * r * P * jac;
                        },
                        a, b, 32);
                }
                err = std::max(err, std::abs(total - 1));
            }
        rep.entries.push_back(bound_entry("kernel normalization", err, 1e-8, "N = 2, 3 at 10 (x_N, t) each"));
    });

    guarded(rep, "kernel K mass", [&] {
        double err0 = 0, excess = 0;
        for (int s = 0; s < 10; ++s) {
            const double t = log_uniform(rng, 1e-2, 1e2);
            for (double xn : {0.0, 0.3 * std::sqrt(t), 2 * std::sqrt(t)}) {
                const double w = 12 * std::sqrt(t);
                const int panels = 12, nodes = 16;
                auto inner = [&](double yl) {
                    double acc = 0;
                    // split at y_N = x_N where K may change sign
                    const double top = xn + w;
                    std::vector<double> cuts{1e-300, top};
                    if (xn > 0) cuts = {1e-300, xn, top};
                    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
                        for (int p = 0; p < panels; ++p) {
                            const double a = cuts[c] + (cuts[c + 1] - cuts[c]) * p / panels;
                            const double b = cuts[c] + (cuts[c + 1] - cuts[c]) * (p + 1) / panels;
                            acc += integrate_gl(
                                [&](double yn) {
                                    KernelPoint<double> kp{Eigen::Vector2d(0.0, xn), Eigen::Vector2d(yl, yn), t};
                                    return std::abs(dirichlet_kernel_dxn(kp));
                                },
                                a, b, nodes);
                        }
                    return acc;
                };
                double mass = 0;
                for (int p = 0; p < panels; ++p)
                    mass += integrate_gl(inner, -w + 2 * w * p / panels, -w + 2 * w * (p + 1) / panels, nodes);
                const double ref = 1 / std::sqrt(std::numbers::pi * t);
                if (xn == 0)
                    err0 = std::max(err0, std::abs(mass / ref - 1));
                else
                    excess = std::max(excess, mass / ref - 1);
            }
        }
        rep.entries.push_back(bound_entry("kernel K mass at x_N = 0", err0, 1e-6, "relative to (pi t)^{-1/2}"));
        rep.entries.push_back(bound_entry("kernel K mass bound x_N > 0", excess, 1e-6, "relative excess over (pi t)^{-1/2}"));
    });

    guarded(rep, "kernel c_N", [&] {
        const double e = std::max(std::abs(normalization_constant(2) - 1 / std::numbers::pi),
                                  std::abs(normalization_constant(3) - 1 / (2 * std::numbers::pi)));
        rep.entries.push_back(bound_entry("kernel c_N", e, 1e-9, "c_2 vs 1/pi, c_3 vs 1/(2 pi)"));
    });

    guarded(rep, "kernel positivity and factorization", [&] {
        double neg = 0, edge = 0, fact = 0;
        for (int s = 0; s < 1000; ++s) {
            const int N = 2 + s % 2;
            Eigen::VectorXd x(N), y(N);
            for (int d = 0; d + 1 < N; ++d) x(d) = uniform(rng, -3, 3), y(d) = uniform(rng, -3, 3);
            x(N - 1) = s % 10 == 0 ? 0.0 : uniform(rng, 0, 3);
            y(N - 1) = uniform(rng, 1e-3, 3);
            const double t = log_uniform(rng, 1e-2, 1e2);
            KernelPoint<double> kp{x, y, t};
            const double G = dirichlet_heat_kernel(kp);
            const double lat = gauss_kernel((x.head(N - 1) - y.head(N - 1)).eval(), t);
            neg = std::max(neg, -G);
            if (x(N - 1) == 0) edge = std::max(edge, std::abs(G));
            const double split = lat * (gauss_kernel_1d(x(N - 1) - y(N - 1), t) - gauss_kernel_1d(x(N - 1) + y(N - 1), t));
            fact = std::max(fact, std::abs(G - split) / lat);
        }
        rep.entries.push_back(bound_entry("kernel positivity", std::max(neg, edge), 0.0, "min value and boundary value"));
        rep.entries.push_back(bound_entry("kernel factorization", fact, 1e-14, "relative to the lateral factor"));
    });

    guarded(rep, "kernel dP/dt bound", [&] {
        double worst = 0;
        for (int s = 0; s < 1000; ++s) {
            const int N = 2 + s % 2;
            const double r = uniform(rng, 0, 10), sig = log_uniform(rng, 1e-3, 1e2);
            const double lhs = std::abs(poisson_dyn_kernel_dt_radial(N, r, sig));
            const double rhs = std::max(1, N - 1) / sig * poisson_dyn_kernel_radial(N, r, sig);
            worst = std::max(worst, lhs / rhs);
        }
        rep.entries.push_back(bound_entry("kernel dP/dt bound", worst, 1 + 1e-12, "|dP/dt| (x_N + t) / (max(1, N-1) P)"));
    });
}

// --- semigroups

void semigroup_entries(SuiteReport& rep, Rng& rng, const SuiteConfig& cfg, const HalfSpaceGrid& g) {
    const double slack = 1 + cfg.slack;
    guarded(rep, "S1 sup and gradient bounds", [&] {
        double r1 = 0, r2 = 0;
        for (int n = 0; n < cfg.instances; ++n) {
            const Field phi = SmoothDatum::draw(rng, g.lateral_radius(), g.depth()).field(g);
            const double tau = log_uniform(rng, 1e-2, 1e2);
            const double m = std::max(sup_norm(phi), std::abs(phi.far_field().bound()));
            const FieldWithDxn s = S1Op(g, tau).apply_with_dxn(phi);
            r1 = std::max(r1, sup_norm(s.value) / m);
            r2 = std::max(r2, std::sqrt(tau) * sup_norm(s.dxn) / m);
        }
        rep.entries.push_back(bound_entry("S1 sup bound", r1, slack, "sup |S1(tau) phi| / sup |phi|"));
        rep.entries.push_back(bound_entry("S1 gradient bound", r2, slack, "tau^{1/2} sup |d/dx_N S1(tau) phi| / sup |phi|"));
    });

    guarded(rep, "S2 sup bounds", [&] {
        double rb = 0, ri = 0;
        for (int n = 0; n < cfg.instances; ++n) {
            const BoundaryField psi = SmoothDatum::draw(rng, g.lateral_radius(), 0.0).boundary(g);
            const double t = log_uniform(rng, 1e-2, 1e2);
            const double m = std::max(sup_norm(psi), std::abs(psi.far_field().constant()));
            const S2Op op(g, t);
            rb = std::max(rb, sup_norm(op.apply_boundary(psi)) / m);
            ri = std::max(ri, sup_norm(op.apply(psi)) / m);
        }
        rep.entries.push_back(bound_entry("S2 boundary sup bound", rb, slack, "|S2(t) psi| / |psi| on the boundary"));
        rep.entries.push_back(bound_entry("S2 interior sup bound", ri, slack, "sup |S2(t) psi| / |psi|"));
    });

    guarded(rep, "S1 gradient sharpness", [&] {
        const Field one(g, Field::Matrix::Ones(g.n_depth(), g.n_lateral()), FarField::constant(1.0));
        double err = 0;
        for (double tau : {1e-2, 1e-1, 1.0}) {
            const Field d = S1Op(g, tau).apply_dxn(one);
            err = std::max(err, std::abs(std::sqrt(tau) * d(0, g.n_lateral() / 2) * std::sqrt(std::numbers::pi) - 1));
        }
        rep.entries.push_back(bound_entry("S1 gradient sharpness", err, 1e-4, "tau^{1/2} d/dx_N S1(tau) 1 at x_N = 0 vs pi^{-1/2}"));
    });

    guarded(rep, "S1 strip smallness", [&] {
        const double Ls = std::min(1.0, g.depth());
        const Field one(g, Field::Matrix::Ones(g.n_depth(), g.n_lateral()), FarField::constant(1.0));
        double worst = 0;
        for (int n = 0; n < 10; ++n) {
            const double tau = log_uniform(rng, 1e-2, 1e2);
            const double lhs = strip_sup_norm(S1Op(g, tau).apply(one), Ls);
            worst = std::max(worst, lhs / (2 * Ls / std::sqrt(4 * std::numbers::pi * tau)));
        }
        rep.entries.push_back(bound_entry("S1 strip smallness", worst, slack, "strip sup of S1(tau) 1 over 2 L (4 pi tau)^{-1/2}"));
    });

    guarded(rep, "S1 semigroup property", [&] {
        // deep enough that nothing reaches the artificial walls
        const HalfSpaceGrid gs(2, g.lateral_radius(), 4 * g.depth(), g.n_lateral(), 4 * (g.n_depth() - 1) + 1);
        const HalfSpaceGrid gf = refine(gs);
        double ec = 0, ef = 0;
        for (int n = 0; n < 5; ++n) {
            const double D = gs.depth(), X = gs.lateral_radius();
            const SmoothDatum d = SmoothDatum::draw(rng, X / 4, 0.3 * D, 0.5 * D, 0.05 * X + 0.2, 0.1 * X + 0.2);
            const double t1 = log_uniform(rng, 1e-3, 1e-2) * X * X, t2 = log_uniform(rng, 1e-3, 1e-2) * X * X;
            for (const HalfSpaceGrid* gr : {&gs, &gf}) {
                const Field phi = d.field(*gr);
                const Field a = S1Op(*gr, t1 + t2).apply(phi);
                const Field b = S1Op(*gr, t1).apply(S1Op(*gr, t2).apply(phi));
                const double e = sup_norm(a - b) / sup_norm(phi);
                (gr == &gs ? ec : ef) = std::max(gr == &gs ? ec : ef, e);
            }
        }
        std::ostringstream det;
        det << "coarse " << ec << " refined " << ef;
        SuiteEntry e = bound_entry("S1 semigroup property", ef, 1e-3, det.str());
        e.pass = e.pass && (ef <= ec / 3 || ef <= 1e-8);
        rep.entries.push_back(e);
    });

    guarded(rep, "S2 identities", [&] {
        // boundary-resolved lattice for the Poisson identities
        const HalfSpaceGrid gb(2, g.lateral_radius(), g.depth(), 64 * (g.n_lateral() - 1) + 1, g.n_depth());
        double et = 0, ec = 0;
        for (int n = 0; n < 10; ++n) {
            const BoundaryField psi = SmoothDatum::draw(rng, gb.lateral_radius() / 8, 0.0, 0.0, 0.7, 1.4).boundary(gb);
            const double t = log_uniform(rng, 1e-2, 1.0), tp = log_uniform(rng, 1e-2, 1.0);
            const double m = std::max(sup_norm(psi), 1e-300);
            const Field inside = S2Op(gb, t).apply(psi);
            const int k = 1 + static_cast<int>(rng() % (gb.n_depth() - 1));
            const BoundaryField moved = S2Op(gb, t + gb.depth_at(k)).apply_boundary(psi);
            et = std::max(et, (inside.values().row(k).transpose() - moved.values()).cwiseAbs().maxCoeff() / m);
            const BoundaryField once = S2Op(gb, t + tp).apply_boundary(psi);
            const BoundaryField twice = S2Op(gb, t).apply_boundary(S2Op(gb, tp).apply_boundary(psi));
            ec = std::max(ec, sup_norm(once - twice) / m);
        }
        rep.entries.push_back(bound_entry("S2 translation identity", et, 1e-5, "10 configurations"));
        rep.entries.push_back(bound_entry("S2 composition identity", ec, 1e-5, "10 configurations"));
    });
}

// --- Duhamel operators

std::vector<SmoothDatum> draws(Rng& rng, int n, double R, double L) {
    std::vector<SmoothDatum> v;
    for (int i = 0; i < n; ++i) v.push_back(SmoothDatum::draw(rng, R / 2, L));
    return v;
}

double boundary_scale(const BoundaryField& psi) {
    return std::max(sup_norm(psi), std::abs(psi.far_field().constant()));
}

void duhamel_entries(SuiteReport& rep, Rng& rng, const SuiteConfig& cfg, const HalfSpaceGrid& g) {
    const double R = g.lateral_radius();

    guarded(rep, "F1 bound", [&] {
        const auto data = draws(rng, 10, R, 0.0);
        std::vector<double> times;
        for (int j = 0; j < 5; ++j) times.push_back(log_uniform(rng, 1e-2, 1.0));
        calibrated_pair(
            rep, "F1 bound", g, cfg.stability,
            [&](const HalfSpaceGrid& gr) {
                double C = 0;
                for (const SmoothDatum& d : data) {
                    const BoundaryField psi = d.boundary(gr);
                    for (double s : times) {
                        const Field f = f1_eval(psi, s);
                        for (int k = 0; k < gr.n_depth(); ++k)
                            C = std::max(C, f.values().row(k).cwiseAbs().maxCoeff() * (gr.depth_at(k) + s) /
                                                boundary_scale(psi));
                    }
                }
                return C;
            },
            1 + cfg.slack);
    });

    const std::vector<double> eps_set{1e-1, 1e-2, 1e-3};
    const std::vector<double> t_set{1e-2, 1e-1, 5e-1};
    const auto data = draws(rng, 3, R, 0.0);

    guarded(rep, "D_eps bounds", [&] {
        std::map<const HalfSpaceGrid*, std::pair<double, double>> cache;
        auto both = [&](const HalfSpaceGrid& gr) {
            double c_val = 0, c_dxn = 0;
            for (const SmoothDatum& d : data) {
                const BoundaryField psi = d.boundary(gr);
                const double m = boundary_scale(psi);
                for (double eps : eps_set)
                    for (double t : t_set) {
                        const FieldWithDxn D = d_eps_with_dxn(psi, eps, t);
                        c_val = std::max(c_val, sup_norm(D.value) / (std::pow(t, 0.25) * (std::sqrt(eps) + std::pow(t, 0.75)) * m));
                        c_dxn = std::max(c_dxn, std::pow(t, 0.25) * sup_norm(D.dxn) / (std::pow(eps, 0.75) * m));
                    }
            }
            return std::make_pair(c_val, c_dxn);
        };
        const auto coarse = both(g);
        const auto fine = both(refine(g));
        calibrated_pair(rep, "D_eps bound", g, cfg.stability,
                        [&](const HalfSpaceGrid& gr) { return gr.n_lateral() == g.n_lateral() ? coarse.first : fine.first; });
        calibrated_pair(rep, "D_eps gradient bound", g, cfg.stability,
                        [&](const HalfSpaceGrid& gr) { return gr.n_lateral() == g.n_lateral() ? coarse.second : fine.second; });
    });

    guarded(rep, "F2 bound", [&] {
        const auto idata = draws(rng, 3, R, g.depth());
        calibrated_pair(rep, "F2 bound", g, cfg.stability, [&](const HalfSpaceGrid& gr) {
            double C = 0;
            SolverConfig sc;
            for (const SmoothDatum& d : idata) {
                const Field psi = d.field(gr);
                for (double eps : {1e-1, 1e-2}) {
                    const double T = 0.5;
                    const std::vector<double> ts = interval_times(T, sc);
                    TraceHistory trace(gr);
                    double xnorm = 0;
                    for (double t : ts) {
                        const FieldWithDxn v = S1Op(gr, t / eps).apply_with_dxn(psi);
                        trace.append(t, dxn_trace(v.value, v.dxn));
                        xnorm = std::max(xnorm, sup_norm(v.value) + std::sqrt(t / eps) * sup_norm(v.dxn));
                    }
                    for (double t : {0.01, 0.05, 0.2, 0.5}) {
                        const Field F = f2_eval(trace.as_function(), t);
                        for (int k = 1; k < gr.n_depth(); ++k) {
                            const double bound = std::sqrt(eps) * (1 / std::sqrt(t) + h_factor(gr.depth_at(k), t)) * xnorm;
                            C = std::max(C, F.values().row(k).cwiseAbs().maxCoeff() / bound);
                        }
                    }
                }
            }
            return C;
        });
    });

    guarded(rep, "Gauss moment integral", [&] {
        std::vector<std::pair<double, double>> samples;
        for (int s = 0; s < 20; ++s) samples.emplace_back(uniform(rng, 0, 3), log_uniform(rng, 1e-2, 1e2));
        for (double alpha : {0.0, 0.5, 0.75}) {
            auto C_at = [&](int panels) {
                double C = 0;
                for (auto [x, t] : samples)
                    for (int sign : {-1, 1}) {
                        // u = y^{1 - alpha} removes the endpoint singularity
                        const double q = 1 - alpha;
                        auto f = [&](double u) {
                            const double y = std::pow(u, 1 / q);
                            const double z = x + sign * y;
                            return std::abs(z) / t * gauss_kernel_1d(z, t) / q;
                        };
                        const double top = std::pow(x + 40 * std::sqrt(t), q);
                        std::vector<double> cuts{0.0, top};
                        if (sign < 0 && x > 0) cuts = {0.0, std::pow(x, q), top};
                        double I = 0;
                        for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
                            for (int p = 0; p < panels; ++p)
                                I += integrate_gl(f, cuts[c] + (cuts[c + 1] - cuts[c]) * p / panels,
                                                  cuts[c] + (cuts[c + 1] - cuts[c]) * (p + 1) / panels, 16);
                        C = std::max(C, I * std::pow(t, (alpha + 1) / 2));
                    }
                return C;
            };
            const double Cc = C_at(16), Cf = C_at(32);
            std::ostringstream name, det;
            name << "Gauss moment integral alpha " << alpha << " constant stability";
            det << "C coarse " << Cc << " C refined " << Cf;
            rep.entries.push_back(bound_entry(name.str(), std::abs(Cf / Cc - 1), cfg.stability, det.str()));
        }
    });

    guarded(rep, "operator linearity and zero", [&] {
        const BoundaryField p1 = data[0].boundary(g), p2 = data[1].boundary(g);
        const double a = 0.7, b = -1.3;
        const double eps = 0.1, t = 0.3;
        auto rel = [](const Field& x, const Field& y) { return sup_norm(x - y) / std::max(1e-300, sup_norm(y)); };
        double worst = rel(f1_eval(a * p1 + b * p2, t), a * f1_eval(p1, t) + b * f1_eval(p2, t));
        worst = std::max(worst, rel(d_eps_eval(a * p1 + b * p2, eps, t), a * d_eps_eval(p1, eps, t) + b * d_eps_eval(p2, eps, t)));
        const BoundaryField q1 = p1 - BoundaryField(g, Eigen::VectorXd::Constant(g.n_lateral(), p1.far_field().constant()));
        const TraceFn g1 = [&](double s) { return (1 / std::sqrt(s)) * q1; };
        const TraceFn g2 = [&](double s) { return std::exp(-s) * p2; };
        const TraceFn gab = [&](double s) { return a * g1(s) + b * g2(s); };
        worst = std::max(worst, rel(f2_eval(gab, t), a * f2_eval(g1, t) + b * f2_eval(g2, t)));
        const TimeQuadRule r16(16, 0.5, 0.875), r8(8, 0.5, 0.5);
        worst = std::max(worst, rel(d_eps_tilde_eval(gab, eps, t, r16, r8).value,
                                    a * d_eps_tilde_eval(g1, eps, t, r16, r8).value + b * d_eps_tilde_eval(g2, eps, t, r16, r8).value));
        rep.entries.push_back(bound_entry("operator linearity", worst, 1e-12, "F1, F2, D_eps, Dt_eps"));

        const BoundaryField z(g);
        const TraceFn gz = [&](double) { return z; };
        double zero = sup_norm(f1_eval(z, t)) + sup_norm(d_eps_eval(z, eps, t)) + sup_norm(f2_eval(gz, t)) +
                      sup_norm(d_eps_tilde_eval(gz, eps, t, r16, r8).value);
        rep.entries.push_back(bound_entry("operators map zero to zero", zero, 0.0));
    });

    guarded(rep, "D_eps time refinement", [&] {
        const BoundaryField psi = BoundaryField::sample(g, [](double x) { return std::exp(-x * x); });
        const TimeQuadRule base = d_eps_default_rule();
        const TimeQuadRule dbl(2 * base.n_nodes(), 0.25, 0.5);
        double worst = 0;
        for (double eps : {1e-1, 1e-2})
            for (double t : {1e-2, 0.5})
                worst = std::max(worst, sup_norm(d_eps_eval(psi, eps, t, base) - d_eps_eval(psi, eps, t, dbl)));
        rep.entries.push_back(bound_entry("D_eps time refinement", worst, 10 * 1e-6, "doubling the Duhamel nodes"));
    });
}

}  // namespace

SuiteReport run_lemma_suite(const SuiteConfig& cfg) {
    SuiteReport rep;
    Rng rng(cfg.seed);
    kernel_entries(rep, rng);
    std::optional<HalfSpaceGrid> g;
    try {
        g.emplace(2, cfg.R_prime, cfg.L, cfg.n_lateral, cfg.n_depth);
    } catch (const std::exception& e) {
        rep.entries.push_back({"suite grid", false, kMissing, e.what()});
        return rep;
    }
    semigroup_entries(rep, rng, cfg, *g);
    duhamel_entries(rep, rng, cfg, *g);
    return rep;
}

}  // namespace dynbc
