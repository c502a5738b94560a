#include "dynbc/duhamel_ops.hpp"

#include <sstream>
#include <vector>

#include "dynbc/lattice.hpp"
#include "dynbc/semigroups.hpp"

namespace dynbc {

double h_factor(double x_N, double t) {
    if (!(x_N > 0) || !(t > 0)) throw DomainError("h_factor: x_N and t must be positive");
    return x_N <= 1.0 ? std::pow(x_N, -0.75) * std::pow(t, 0.25) : 1.0 / std::sqrt(x_N);
}

Eigen::VectorXd poisson_rate_row(const BoundaryField& psi, double s) {
    if (!(s > 0) || !std::isfinite(s)) throw DomainError("poisson_rate_row: spread must be positive");
    const HalfSpaceGrid& g = psi.grid();
    const auto st = stencil_cache().cauchy_rate(s, g.lateral_step(), g.n_lateral());
    Eigen::VectorXd out = apply_lateral(*st, psi.remainder());
    if (!psi.far_field().layers().empty()) {
        const BoundaryFarField far = psi.far_field().shifted(s);
        for (int i = 0; i < g.n_lateral(); ++i) out(i) += far.rate(g.lateral(i));
    }
    return out;
}

Field f1_eval(const BoundaryField& phi_b, double t) {
    if (!(t > 0)) throw DomainError("f1_eval: t must be positive");
    const HalfSpaceGrid& g = phi_b.grid();
    Field::Matrix m(g.n_depth(), g.n_lateral());
    for (int k = 0; k < g.n_depth(); ++k) m.row(k) = poisson_rate_row(phi_b, g.depth_at(k) + t).transpose();
    return Field(g, std::move(m));
}

TimeQuadRule f2_default_rule() { return TimeQuadRule(32, 0.5, 0.5); }
TimeQuadRule d_eps_default_rule() { return TimeQuadRule(64, 0.25, 0.5); }
TimeQuadRule d_eps_tilde_default_rule() { return TimeQuadRule(64, 0.5, 0.875); }

BoundaryField f2_memory(const TraceFn& trace, double t, const TimeQuadRule& rule) {
    if (!(t > 0)) throw DomainError("f2_memory: t must be positive");
    const auto nodes = rule.nodes(0.0, t);
    const HalfSpaceGrid grid = trace(nodes.front().s).grid();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.n_lateral());
    for (const TimeNode& n : nodes) {
        if (!(n.s > 0)) continue;
        const Eigen::VectorXd row = poisson_rate_row(trace(n.s), n.remaining);
        const double m = row.cwiseAbs().maxCoeff() * n.weight;
        if (!std::isfinite(m) || m > detail::overflow_guard) {
            std::ostringstream msg;
            msg << "f2_memory: non-integrable trace at s=" << n.s;
            throw NumericalError(msg.str());
        }
        acc += n.weight * row;
    }
    return BoundaryField(grid, std::move(acc));
}

Field f2_from_boundary(const BoundaryField& total) { return poisson_extension(total); }

F2Split f2_split(const TraceFn& trace, double t, const TimeQuadRule& rule) {
    return {poisson_extension(trace(t)), poisson_extension(f2_memory(trace, t, rule))};
}

Field f2_eval(const TraceFn& trace, double t, const TimeQuadRule& rule) {
    BoundaryField total = trace(t);
    total += f2_memory(trace, t, rule);
    return poisson_extension(total);
}

FieldWithDxn smoothed_duhamel(const HalfSpaceGrid& grid, double eps, double t, const TimeQuadRule& rule,
                              const std::function<Field(double)>& forcing) {
    if (!(eps > 0)) throw DomainError("smoothed_duhamel: eps must be positive");
    if (!(t > 0)) throw DomainError("smoothed_duhamel: t must be positive");
    const auto nodes = rule.nodes(0.0, t);
    const int n = static_cast<int>(nodes.size());
    std::vector<FieldWithDxn> terms(n, FieldWithDxn{Field(grid), Field(grid)});
    std::vector<char> used(n, 0);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n; ++j) {
        try {
            const TimeNode& node = nodes[j];
            if (!(node.s > 0) || !(node.remaining > 0)) continue;
            terms[j] = S1Op(grid, node.remaining / eps).apply_with_dxn(forcing(node.s));
            used[j] = 1;
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    FieldWithDxn acc{Field(grid), Field(grid)};
    for (int j = 0; j < n; ++j) {
        if (!used[j]) continue;
        const double m = magnitude(terms[j]) * nodes[j].weight;
        if (!std::isfinite(m) || m > detail::overflow_guard) {
            std::ostringstream msg;
            msg << "duhamel quadrature: non-integrable growth at s=" << nodes[j].s;
            throw NumericalError(msg.str());
        }
        acc.value += nodes[j].weight * terms[j].value;
        acc.dxn += nodes[j].weight * terms[j].dxn;
    }
    return acc;
}

FieldWithDxn d_eps_with_dxn(const BoundaryField& phi_b, double eps, double t, const TimeQuadRule& rule) {
    return smoothed_duhamel(phi_b.grid(), eps, t, rule, [&](double s) { return f1_eval(phi_b, s); });
}

Field d_eps_eval(const BoundaryField& phi_b, double eps, double t, const TimeQuadRule& rule) {
    return d_eps_with_dxn(phi_b, eps, t, rule).value;
}

FieldWithDxn d_eps_tilde_eval(const TraceFn& trace, double eps, double t, const TimeQuadRule& rule,
                              const TimeQuadRule& inner) {
    const HalfSpaceGrid grid = trace(t).grid();
    return smoothed_duhamel(grid, eps, t, rule, [&](double s) { return f2_eval(trace, s, inner); });
}

}  // namespace dynbc
