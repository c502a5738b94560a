#include "dynbc/semigroups.hpp"

#include <Eigen/QR>
#include <complex>

#include "dynbc/lattice.hpp"

namespace dynbc {

S1Op::S1Op(const HalfSpaceGrid& grid, double tau) : grid_(grid), tau_(tau) {
    if (!(tau > 0) || !std::isfinite(tau)) throw DomainError("S1Op: diffusion time must be positive");
    const int n = grid.n_lateral();
    const int m = grid.n_depth();
    lateral_ = lateral_matrix(lateral_stencil(GaussFamily{tau}, grid.lateral_step(), n), n);
    depth_ = depth_matrix(depth_stencil(GaussFamily{tau}, grid.depth_step(), m), m, -1.0);
    depth_dxn_ = depth_matrix(depth_stencil(GaussSlopeFamily{tau}, grid.depth_step(), m), m, 1.0);
}

Eigen::MatrixXd S1Op::lateral_pass(const Field& phi) const {
    require_same_grid(grid_, phi.grid(), "S1Op");
    Eigen::MatrixXd centered = phi.values();
    if (!phi.far_field().is_zero())
        for (int k = 0; k < grid_.n_depth(); ++k)
            centered.row(k).array() -= phi.far_field().value(grid_.depth_at(k));
    Eigen::MatrixXd r(grid_.n_depth(), grid_.n_lateral());
    r.noalias() = centered * lateral_.transpose();
    return r;
}

namespace {

Field finish(const HalfSpaceGrid& g, Eigen::MatrixXd values, const FarField& far, bool derivative) {
    if (!far.is_zero())
        for (int k = 0; k < g.n_depth(); ++k)
            values.row(k).array() += derivative ? far.dxn(g.depth_at(k)) : far.value(g.depth_at(k));
    return Field(g, std::move(values), derivative ? FarField{} : far);
}

}  // namespace

Field S1Op::apply(const Field& phi) const {
    const Eigen::MatrixXd r = lateral_pass(phi);
    Eigen::MatrixXd v(grid_.n_depth(), grid_.n_lateral());
    v.noalias() = depth_ * r;
    return finish(grid_, std::move(v), phi.far_field().diffused(tau_), false);
}

Field S1Op::apply_dxn(const Field& phi) const {
    const Eigen::MatrixXd r = lateral_pass(phi);
    Eigen::MatrixXd d(grid_.n_depth(), grid_.n_lateral());
    d.noalias() = depth_dxn_ * r;
    return finish(grid_, std::move(d), phi.far_field().diffused(tau_), true);
}

FieldWithDxn S1Op::apply_with_dxn(const Field& phi) const {
    const Eigen::MatrixXd r = lateral_pass(phi);
    const FarField far = phi.far_field().diffused(tau_);
    Eigen::MatrixXd v(grid_.n_depth(), grid_.n_lateral());
    Eigen::MatrixXd d(grid_.n_depth(), grid_.n_lateral());
    v.noalias() = depth_ * r;
    d.noalias() = depth_dxn_ * r;
    return {finish(grid_, std::move(v), far, false), finish(grid_, std::move(d), far, true)};
}

S2Op::S2Op(const HalfSpaceGrid& grid, double t) : grid_(grid), t_(t) {
    if (!(t >= 0) || !std::isfinite(t)) throw DomainError("S2Op: time must be >= 0");
}

namespace {

// exterior matching: layer count, node spacing and spread floor (fractions of R')
constexpr int kLayers = 9;
constexpr double kLayerSpacing = 0.125;
constexpr double kLayerFloor = 0.0625;

}  // namespace

double lattice_mass(const Eigen::VectorXd& v, double h) {
    const Eigen::Index n = v.size();
    return h * (v.sum() - 0.5 * (v(0) + v(n - 1)));
}

PoissonRow poisson_row(const BoundaryField& psi, double s) {
    if (s == 0.0) return {psi.values(), psi.far_field()};
    const HalfSpaceGrid& g = psi.grid();
    const auto st = stencil_cache().cauchy(s, g.lateral_step(), g.n_lateral());
    const Eigen::VectorXd rem = psi.remainder();
    PoissonRow row{apply_lateral(*st, rem), psi.far_field().shifted(s)};
    if (!row.far.is_zero())
        for (int i = 0; i < g.n_lateral(); ++i) row.values(i) += row.far.value(g.lateral(i));
    // The remainder's exterior is matched by a few layers on fixed nodes. The
    // Cauchy tail of P_s * rem expands in Im sum rem(y) (y + i s)^n / x^{n+1},
    // so the layers reproduce those moments for n = 1..K. A spike narrower
    // than the lattice can carry would come back through the next remainder,
    // which is why the layers never get a spread below sigma_min.
    const double h = g.lateral_step();
    const Eigen::VectorXd x = g.lateral_nodes();
    if (rem.cwiseAbs().maxCoeff() == 0.0) return row;
    const int K = kLayers;
    const double R = g.lateral_radius();
    const double sigma = std::max(s, kLayerFloor * R);
    const double a = kLayerSpacing * R;
    const double unit = std::max(R, sigma);
    Eigen::MatrixXd A(K, K);
    Eigen::VectorXd b(K);
    Eigen::VectorXcd pw = Eigen::VectorXcd::Ones(x.size());
    const Eigen::VectorXcd z = (x.cast<std::complex<double>>().array() + std::complex<double>(0.0, s)) / unit;
    std::vector<double> c(K);
    for (int j = 0; j < K; ++j) c[j] = a * (j - 0.5 * (K - 1));
    for (int n = 1; n <= K; ++n) {
        pw = pw.cwiseProduct(z);
        b(n - 1) = lattice_mass(rem.cwiseProduct(pw.imag()), h);
        for (int j = 0; j < K; ++j) A(n - 1, j) = std::pow(std::complex<double>(c[j], sigma) / unit, n).imag();
    }
    const Eigen::VectorXd m = A.colPivHouseholderQr().solve(b);
    for (int j = 0; j < K; ++j)
        if (m(j) != 0.0 && std::isfinite(m(j))) row.far.add_layer(m(j), sigma, c[j]);
    return row;
}

Field S2Op::apply(const BoundaryField& psi) const {
    require_same_grid(grid_, psi.grid(), "S2Op");
    Field::Matrix m(grid_.n_depth(), grid_.n_lateral());
    for (int k = 0; k < grid_.n_depth(); ++k) m.row(k) = poisson_row(psi, grid_.depth_at(k) + t_).values.transpose();
    return Field(grid_, std::move(m), FarField::constant(psi.far_field().constant()));
}

BoundaryField S2Op::apply_boundary(const BoundaryField& psi) const {
    require_same_grid(grid_, psi.grid(), "S2Op");
    PoissonRow row = poisson_row(psi, t_);
    return BoundaryField(grid_, std::move(row.values), std::move(row.far));
}

Field poisson_extension(const BoundaryField& psi) { return S2Op(psi.grid(), 0.0).apply(psi); }

}  // namespace dynbc
