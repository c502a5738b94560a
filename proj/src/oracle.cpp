#include "dynbc/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynbc/semigroups.hpp"

namespace dynbc {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Column-major node index over (depth k, lateral i) matching Field::values().
struct Index {
    int nd;
    int operator()(int k, int i) const { return i * nd + k; }
};

// Adds -c * Lap at interior node (k, i) with mirrored neighbours on the walls.
void add_laplacian_row(Triplets& t, const HalfSpaceGrid& g, int k, int i, double c) {
    const Index id{g.n_depth()};
    const int nl = g.n_lateral(), nd = g.n_depth();
    const double ax = c / (g.lateral_step() * g.lateral_step());
    const double az = c / (g.depth_step() * g.depth_step());
    const int row = id(k, i);
    t.emplace_back(row, row, 2 * ax + 2 * az);
    const int il = i == 0 ? 1 : i - 1;
    const int ir = i == nl - 1 ? nl - 2 : i + 1;
    t.emplace_back(row, id(k, il), -ax);
    t.emplace_back(row, id(k, ir), -ax);
    const int kd = k == nd - 1 ? nd - 2 : k + 1;
    t.emplace_back(row, id(k - 1, i), -az);
    t.emplace_back(row, id(kd, i), -az);
}

Eigen::VectorXd flatten(const Field::Matrix& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

Field::Matrix unflatten(const Eigen::VectorXd& v, const HalfSpaceGrid& g) {
    return Eigen::Map<const Field::Matrix>(v.data(), g.n_depth(), g.n_lateral());
}

}  // namespace

FDHistory fd_solve(const ProblemSpec& spec, const FDConfig& cfg) {
    const HalfSpaceGrid& g = spec.phi.grid();
    require_same_grid(g, spec.phi_b.grid(), "fd_solve");
    if (!(cfg.dt > 0)) throw DomainError("fd_solve: dt must be positive");
    if (!(spec.eps > 0)) throw DomainError("fd_solve: eps must be positive");
    if (g.n_depth() < 4) throw DomainError("fd_solve: need at least 4 depth nodes");
    const int nl = g.n_lateral(), nd = g.n_depth();
    const Index id{nd};
    const double dt = cfg.dt;

    Triplets t;
    t.reserve(std::size_t(nl) * nd * 5);
    const double hz = g.depth_step();
    for (int i = 0; i < nl; ++i) {
        // (u0' - u0)/dt = (-3 u0' + 4 u1' - u2') / (2 hz)
        const int row = id(0, i);
        t.emplace_back(row, row, 1.0 + dt * 3.0 / (2 * hz));
        t.emplace_back(row, id(1, i), -dt * 4.0 / (2 * hz));
        t.emplace_back(row, id(2, i), dt * 1.0 / (2 * hz));
        for (int k = 1; k < nd; ++k) {
            t.emplace_back(id(k, i), id(k, i), spec.eps / dt);
            add_laplacian_row(t, g, k, i, 1.0);
        }
    }
    Eigen::SparseMatrix<double> A(nl * nd, nl * nd);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw NumericalError("fd_solve: factorization failed");

    Field::Matrix u0 = spec.phi.values();
    u0.row(0) = spec.phi_b.values().transpose();
    Eigen::VectorXd u = flatten(u0);

    FDHistory out;
    out.diffusion_number = dt / (spec.eps * std::pow(std::min(g.lateral_step(), g.depth_step()), 2));
    std::vector<long> steps;
    for (double o : cfg.output_times) {
        if (!(o > 0)) throw DomainError("fd_solve: output times must be positive");
        steps.push_back(std::max(1L, std::lround(o / dt)));
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    const double t_max = steps.empty() ? 0.0 : steps.back() * dt;
    out.pollution_radius = std::sqrt(t_max / spec.eps);
    const double wall = std::min(g.lateral_radius(), g.depth());
    if (out.pollution_radius > wall) {
        std::ostringstream msg;
        msg << "diffusion length " << out.pollution_radius << " exceeds the nearest artificial wall at " << wall;
        out.warnings.push_back(msg.str());
    }

    Eigen::VectorXd rhs(u.size());
    std::size_t next = 0;
    for (long n = 1; next < steps.size(); ++n) {
        for (int i = 0; i < nl; ++i) {
            rhs(id(0, i)) = u(id(0, i));
            for (int k = 1; k < nd; ++k) rhs(id(k, i)) = spec.eps / dt * u(id(k, i));
        }
        u = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !u.allFinite()) {
            std::ostringstream msg;
            msg << "fd_solve: linear solve failed at step " << n;
            throw NumericalError(msg.str());
        }
        if (n == steps[next]) {
            out.times.push_back(n * dt);
            out.u.emplace_back(g, unflatten(u, g));
            ++next;
        }
    }
    return out;
}

Field fd_interior_step(const Field& f, double eps, double dt) {
    const HalfSpaceGrid& g = f.grid();
    if (!(dt > 0) || !(eps > 0)) throw DomainError("fd_interior_step: eps and dt must be positive");
    const int nl = g.n_lateral(), nd = g.n_depth();
    const Index id{nd};
    Triplets t;
    for (int i = 0; i < nl; ++i) {
        t.emplace_back(id(0, i), id(0, i), 1.0);
        for (int k = 1; k < nd; ++k) {
            t.emplace_back(id(k, i), id(k, i), eps / dt);
            add_laplacian_row(t, g, k, i, 1.0);
        }
    }
    Eigen::SparseMatrix<double> A(nl * nd, nl * nd);
    A.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    Eigen::VectorXd rhs = flatten(f.values());
    for (int i = 0; i < nl; ++i)
        for (int k = 1; k < nd; ++k) rhs(id(k, i)) *= eps / dt;
    const Eigen::VectorXd u = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw NumericalError("fd_interior_step: solve failed");
    return Field(g, unflatten(u, g));
}

Field limit_solution(const BoundaryField& phi_b, double t) { return S2Op(phi_b.grid(), t).apply(phi_b); }

Field discrete_laplacian(const Field& f) {
    const HalfSpaceGrid& g = f.grid();
    const auto& v = f.values();
    const double ax = 1.0 / (g.lateral_step() * g.lateral_step());
    const double az = 1.0 / (g.depth_step() * g.depth_step());
    Field::Matrix out = Field::Matrix::Zero(g.n_depth(), g.n_lateral());
    for (int i = 1; i + 1 < g.n_lateral(); ++i)
        for (int k = 1; k + 1 < g.n_depth(); ++k)
            out(k, i) = ax * (v(k, i - 1) - 2 * v(k, i) + v(k, i + 1)) + az * (v(k - 1, i) - 2 * v(k, i) + v(k + 1, i));
    return Field(g, std::move(out));
}

OracleGap oracle_gap(const SolverRun& run, const FDHistory& fd, double K_lateral, double K_depth) {
    OracleGap out;
    for (std::size_t j = 0; j < fd.times.size(); ++j) {
        const double t = fd.times[j];
        const auto it = std::find_if(run.times.begin(), run.times.end(), [t](double s) { return std::abs(s - t) <= 1e-9; });
        if (it == run.times.end()) {
            std::ostringstream msg;
            msg << "oracle_gap: no mild solution stored at t=" << t;
            throw DomainError(msg.str());
        }
        const Field& mild = run.u[std::size_t(it - run.times.begin())];
        const Field& ref = fd.u[j];
        require_same_grid(mild.grid(), ref.grid(), "oracle_gap");
        const HalfSpaceGrid& g = ref.grid();
        double gap = 0;
        for (int i = 0; i < g.n_lateral(); ++i) {
            if (std::abs(g.lateral(i)) > K_lateral * (1 + 1e-12)) continue;
            for (int k = 0; k < g.n_depth() && g.depth_at(k) <= K_depth * (1 + 1e-12); ++k)
                gap = std::max(gap, std::abs(ref(k, i) - mild(k, i)));
        }
        out.times.push_back(t);
        out.gaps.push_back(gap);
        out.sup_gap = std::max(out.sup_gap, gap);
    }
    return out;
}

}  // namespace dynbc
