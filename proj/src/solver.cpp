#include "dynbc/solver.hpp"

#include <algorithm>
#include <sstream>

#include "dynbc/semigroups.hpp"

namespace dynbc {

PreparedProblem prepare(const ProblemSpec& spec) {
    if (!(spec.eps > 0 && spec.eps < 1)) throw DomainError("prepare: eps must lie in (0, 1)");
    if (!(spec.horizon > 0) || !std::isfinite(spec.horizon)) throw DomainError("prepare: horizon must be positive");
    require_same_grid(spec.phi.grid(), spec.phi_b.grid(), "prepare");
    PreparedProblem p{spec, spec.phi - poisson_extension(spec.phi_b), 0.0};
    p.m = 16.0 * std::max(sup_norm(spec.phi), sup_norm(spec.phi_b));
    if (!std::isfinite(p.m)) throw DomainError("prepare: data must be bounded");
    return p;
}

std::vector<double> interval_times(double T, const SolverConfig& cfg, const std::vector<double>& extra) {
    if (!(T > 0)) throw DomainError("interval_times: T must be positive");
    std::vector<double> t;
    for (int k = 1; k <= cfg.mesh_cells; ++k) {
        const double r = double(k) / cfg.mesh_cells;
        t.push_back(T * r * r);
    }
    for (int j = 0; j <= cfg.geometric_levels; ++j) t.push_back(std::ldexp(T, -j));
    for (double e : extra)
        if (e > 0 && e <= T) t.push_back(e);
    std::sort(t.begin(), t.end());
    std::vector<double> out;
    for (double x : t)
        if (out.empty() || x - out.back() > 1e-12 * x) out.push_back(x);
    return out;
}

// ---- trace history -------------------------------------------------------

void TraceHistory::append(double t, const BoundaryField& g) {
    require_same_grid(grid_, g.grid(), "TraceHistory::append");
    if (!(t > 0)) throw DomainError("TraceHistory: times must be positive");
    std::unique_lock lock(mutex_);
    if (!times_.empty() && !(t > times_.back())) throw DomainError("TraceHistory: appends must increase in time");
    const int n = grid_.n_lateral();
    const double th = std::sqrt(t);
    Eigen::VectorXd col(n + 1);
    col.head(n) = th * g.values();
    col(n) = th * g.far_field().constant();
    times_.push_back(t);
    theta_.push_back(th);
    scaled_.conservativeResize(n + 1, Eigen::Index(times_.size()));
    scaled_.col(scaled_.cols() - 1) = col;
    rebuild_slopes();
}

std::size_t TraceHistory::size() const {
    std::shared_lock lock(mutex_);
    return times_.size();
}

namespace {

int sign(double x) { return (x > 0) - (x < 0); }

}  // namespace

void TraceHistory::rebuild_slopes() {
    const Eigen::Index rows = scaled_.rows();
    const int m = static_cast<int>(theta_.size());
    slopes_ = Eigen::MatrixXd::Zero(rows, m);
    if (m < 2) return;
    std::vector<double> h(m - 1);
    for (int j = 0; j + 1 < m; ++j) h[j] = theta_[j + 1] - theta_[j];
    for (Eigen::Index r = 0; r < rows; ++r) {
        std::vector<double> d(m - 1);
        for (int j = 0; j + 1 < m; ++j) d[j] = (scaled_(r, j + 1) - scaled_(r, j)) / h[j];
        if (m == 2) {
            slopes_(r, 0) = slopes_(r, 1) = d[0];
            continue;
        }
        for (int j = 1; j + 1 < m; ++j) {
            if (d[j - 1] * d[j] <= 0) continue;
            const double w1 = 2 * h[j] + h[j - 1], w2 = h[j] + 2 * h[j - 1];
            slopes_(r, j) = (w1 + w2) / (w1 / d[j - 1] + w2 / d[j]);
        }
        auto end_slope = [](double h0, double h1, double d0, double d1) {
            double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (sign(s) != sign(d0))
                s = 0;
            else if (sign(d0) != sign(d1) && std::abs(s) > 3 * std::abs(d0))
                s = 3 * d0;
            return s;
        };
        slopes_(r, 0) = end_slope(h[0], h[1], d[0], d[1]);
        slopes_(r, m - 1) = end_slope(h[m - 2], h[m - 3], d[m - 2], d[m - 3]);
    }
}

BoundaryField TraceHistory::at(double s) const {
    if (!(s > 0)) throw DomainError("TraceHistory: s must be positive");
    std::shared_lock lock(mutex_);
    const int n = grid_.n_lateral();
    if (times_.empty()) return BoundaryField(grid_);
    const double th = std::sqrt(s);
    Eigen::VectorXd y;
    const int m = static_cast<int>(theta_.size());
    if (th <= theta_.front()) {
        y = scaled_.col(0);
    } else if (th >= theta_.back()) {
        y = scaled_.col(m - 1);
    } else {
        const int j = int(std::upper_bound(theta_.begin(), theta_.end(), th) - theta_.begin()) - 1;
        const double h = theta_[j + 1] - theta_[j];
        const double x = (th - theta_[j]) / h;
        const double h00 = (1 + 2 * x) * (1 - x) * (1 - x), h10 = x * (1 - x) * (1 - x);
        const double h01 = x * x * (3 - 2 * x), h11 = x * x * (x - 1);
        y = h00 * scaled_.col(j) + h10 * h * slopes_.col(j) + h01 * scaled_.col(j + 1) + h11 * h * slopes_.col(j + 1);
    }
    y /= th;
    return BoundaryField(grid_, y.head(n), BoundaryFarField(y(n)));
}

// ---- histories -------------------------------------------------------------

BoundaryField dxn_trace(const Field& v, const Field& dxn) {
    return BoundaryField(v.grid(), dxn.values().row(0).transpose(), BoundaryFarField(v.far_field().dxn(0.0)));
}

double xt_norm(const VHistory& v, double eps) {
    double out = 0;
    for (std::size_t j = 0; j < v.times.size(); ++j)
        out = std::max(out, sup_norm(v.fields[j].value) + std::sqrt(v.times[j] / eps) * sup_norm(v.fields[j].dxn));
    return out;
}

VHistory operator-(const VHistory& a, const VHistory& b) {
    if (a.times != b.times) throw DomainError("VHistory: time sets differ");
    VHistory out{a.times, a.fields};
    for (std::size_t j = 0; j < out.fields.size(); ++j) out.fields[j] -= b.fields[j];
    return out;
}

namespace {

bool carries_no_rate(const BoundaryField& psi) {
    return psi.far_field().layers().empty() && psi.remainder().cwiseAbs().maxCoeff() == 0.0;
}

void fill_trace(TraceHistory& h, const VHistory& v) {
    for (std::size_t j = 0; j < v.times.size(); ++j) h.append(v.times[j], dxn_trace(v.fields[j].value, v.fields[j].dxn));
}

}  // namespace

VHistory q_eps_base(const PreparedProblem& prob, const std::vector<double>& times, const SolverConfig& cfg) {
    const HalfSpaceGrid& g = prob.Phi.grid();
    const double eps = prob.spec.eps;
    const bool no_forcing = carries_no_rate(prob.spec.phi_b);
    VHistory out{times, {}};
    for (double t : times) {
        FieldWithDxn f = S1Op(g, t / eps).apply_with_dxn(prob.Phi);
        if (!no_forcing) f -= d_eps_with_dxn(prob.spec.phi_b, eps, t, cfg.d_rule);
        out.fields.push_back(std::move(f));
    }
    return out;
}

VHistory d_tilde_history(const PreparedProblem& prob, const VHistory& v, const SolverConfig& cfg) {
    const HalfSpaceGrid& g = prob.Phi.grid();
    VHistory out{v.times, {}};
    bool zero = true;
    for (const auto& f : v.fields) zero = zero && sup_norm(f.dxn) == 0.0 && f.value.far_field().is_zero();
    if (zero) {
        out.fields.assign(v.times.size(), FieldWithDxn{Field(g), Field(g)});
        return out;
    }
    TraceHistory trace(g);
    fill_trace(trace, v);
    const TraceFn fn = trace.as_function();
    // the boundary datum of F2 (trace plus memory) is formed at the sample
    // times and interpolated like the trace itself
    TraceHistory forcing(g);
    for (double t : v.times) forcing.append(t, trace.at(t) + f2_memory(fn, t, cfg.f2_rule));
    const auto f2 = [&](double s) { return f2_from_boundary(forcing.at(s)); };
    for (double t : v.times) out.fields.push_back(smoothed_duhamel(g, prob.spec.eps, t, cfg.dt_rule, f2));
    return out;
}

VHistory q_eps_apply(const PreparedProblem& prob, const VHistory& base, const VHistory& v, const SolverConfig& cfg) {
    return base - d_tilde_history(prob, v, cfg);
}

VHistory q_eps_apply(const PreparedProblem& prob, const VHistory& v, const SolverConfig& cfg) {
    return q_eps_apply(prob, q_eps_base(prob, v.times, cfg), v, cfg);
}

IntervalSolution solve_interval(const PreparedProblem& prob, double T_guess, const SolverConfig& cfg,
                                const std::vector<double>& extra_times, const std::optional<VHistory>& initial) {
    if (!(T_guess > 0)) throw DomainError("solve_interval: T_guess must be positive");
    const double tol = cfg.picard_tol * prob.m;
    double T = T_guess;
    int halvings = 0;
    std::vector<double> last_residuals;
    while (true) {
        const std::vector<double> times = interval_times(T, cfg, extra_times);
        const VHistory base = q_eps_base(prob, times, cfg);
        VHistory v = initial && initial->times == times ? *initial : base;
        std::vector<double> residuals;
        int high = 0;
        for (int it = 1; it <= cfg.max_iterations; ++it) {
            VHistory next = q_eps_apply(prob, base, v, cfg);
            const double r = xt_norm(next - v, prob.spec.eps);
            v = std::move(next);
            residuals.push_back(r);
            if (r <= tol) return {std::move(v), T, it, std::move(residuals), halvings};
            if (residuals.size() >= 2 && r > cfg.ratio_threshold * residuals[residuals.size() - 2])
                ++high;
            else
                high = 0;
            if (high >= 2) break;
        }
        last_residuals = residuals;
        T *= 0.5;
        ++halvings;
        if (T < cfg.t_min) {
            std::ostringstream msg;
            msg << "solve_interval: contraction not observed down to T=" << 2 * T << " (residuals";
            for (double r : last_residuals) msg << ' ' << r;
            msg << "); the discretization is likely too coarse";
            throw NumericalError(msg.str());
        }
    }
}

BoundaryField boundary_memory(const TraceFn& trace, double t, const TimeQuadRule& rule) {
    if (!(t > 0)) throw DomainError("boundary_memory: t must be positive");
    const auto nodes = rule.nodes(0.0, t);
    std::optional<BoundaryField> acc;
    for (const TimeNode& n : nodes) {
        if (!(n.s > 0)) continue;
        const BoundaryField g = trace(n.s);
        const PoissonRow row = poisson_row(g, n.remaining);
        BoundaryField term(g.grid(), row.values, BoundaryFarField(g.far_field().constant()));
        term *= n.weight;
        if (acc)
            *acc += term;
        else
            acc.emplace(std::move(term));
    }
    if (!acc) throw DomainError("boundary_memory: empty rule");
    return *acc;
}

namespace {

BoundaryField evolve(const BoundaryField& psi, double t) {
    PoissonRow row = poisson_row(psi, t);
    return BoundaryField(psi.grid(), std::move(row.values), std::move(row.far));
}

}  // namespace

SolverRun continue_global(const PreparedProblem& prob, double horizon, const SolverConfig& cfg,
                          const std::vector<double>& output_times) {
    if (!(horizon > 0)) throw DomainError("continue_global: horizon must be positive");
    const HalfSpaceGrid& g = prob.Phi.grid();
    SolverRun run;
    run.eps = prob.spec.eps;

    PreparedProblem cur = prob;
    BoundaryField memory(g);
    double t0 = 0;
    const double T0 = std::min(1.0, horizon);
    double T_guess = T0;
    while (t0 < horizon * (1 - 1e-12)) {
        const double T_int = std::min(T_guess, horizon - t0);
        std::vector<double> extra;
        for (double o : output_times)
            if (o > t0 && o <= t0 + T_int * (1 + 1e-12)) extra.push_back(std::min(o - t0, T_int));
        IntervalSolution sol;
        try {
            sol = solve_interval(cur, T_int, cfg, extra);
        } catch (const std::exception& e) {
            run.complete = false;
            run.failure = e.what();
            return run;
        }
        run.interval_starts.push_back(t0);
        run.T_star.push_back(sol.T_star);
        run.iterations.push_back(sol.iterations);
        run.residuals.push_back(sol.residuals);

        TraceHistory trace(g);
        fill_trace(trace, sol.v);
        const TraceFn fn = trace.as_function();
        BoundaryField wb_end(g), mem_end(g);
        for (std::size_t j = 0; j < sol.v.times.size(); ++j) {
            const double t = sol.v.times[j];
            const BoundaryField I = boundary_memory(fn, t, cfg.w_rule);
            BoundaryField wb = evolve(cur.spec.phi_b, t) + I;
            BoundaryField mem = evolve(memory, t) + I;
            Field w = poisson_extension(wb);
            const FieldWithDxn& v = sol.v.fields[j];
            run.times.push_back(t0 + t);
            run.v.push_back(v.value);
            run.dxn_v.push_back(v.dxn);
            run.u.push_back(v.value + w);
            run.w.push_back(std::move(w));
            run.norm_history.push_back(sup_norm(v.value) + std::sqrt(t / run.eps) * sup_norm(v.dxn));
            if (j + 1 == sol.v.times.size()) {
                wb_end = wb;
                mem_end = mem;
            }
            run.w_boundary.push_back(std::move(wb));
            run.w_memory.push_back(std::move(mem));
        }

        t0 += sol.T_star;
        if (t0 >= horizon * (1 - 1e-12)) break;
        // restart: interior data u(t0) = v + S2(0) w_b, boundary data w_b
        const Field& v_end = sol.v.fields.back().value;
        ProblemSpec next{v_end + poisson_extension(wb_end), wb_end, prob.spec.eps, horizon - t0};
        cur = PreparedProblem{next, v_end, 16.0 * std::max(sup_norm(next.phi), sup_norm(next.phi_b))};
        memory = mem_end;
        T_guess = std::min(T0, 2 * sol.T_star);
    }
    return run;
}

}  // namespace dynbc
