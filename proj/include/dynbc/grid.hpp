#pragma once

// Truncated half-space [-R', R'] x [0, L] sampled on a uniform lattice, and the
// scalar fields living on it.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dynbc/errors.hpp"

namespace dynbc {

class HalfSpaceGrid {
public:
    HalfSpaceGrid() = default;
    /// Lateral nodes -R' + i h', depth nodes k h_N. Only N = 2 is implemented.
    HalfSpaceGrid(int N, double lateral_radius, double depth, int n_lateral, int n_depth);

    int dim() const { return N_; }
    double lateral_radius() const { return R_; }
    double depth() const { return L_; }
    int n_lateral() const { return n_lat_; }
    int n_depth() const { return n_dep_; }
    double lateral_step() const { return 2.0 * R_ / (n_lat_ - 1); }
    double depth_step() const { return L_ / (n_dep_ - 1); }
    int center() const { return (n_lat_ - 1) / 2; }

    double lateral(int i) const { return -R_ + i * lateral_step(); }
    double depth_at(int k) const { return k * depth_step(); }
    Eigen::VectorXd lateral_nodes() const;
    Eigen::VectorXd depth_nodes() const;

    /// Index pair (lateral i, depth k) of the node closest to (x', x_N).
    std::pair<int, int> nearest(double x_prime, double x_N) const;

    bool operator==(const HalfSpaceGrid&) const = default;

private:
    int N_ = 2;
    double R_ = 1.0;
    double L_ = 1.0;
    int n_lat_ = 3;
    int n_dep_ = 2;
};

void require_same_grid(const HalfSpaceGrid& a, const HalfSpaceGrid& b, const char* where);

/// Exterior behaviour of a field outside the box: a sum of terms
/// level * erf(x_N / (2 sqrt(time))), with time == 0 meaning a plain constant.
/// This family is closed under the Dirichlet heat semigroup.
struct ErfLayer {
    double level = 0.0;
    double time = 0.0;
    bool operator==(const ErfLayer&) const = default;
};

class FarField {
public:
    FarField() = default;
    static FarField constant(double c);

    const std::vector<ErfLayer>& layers() const { return layers_; }
    bool is_zero() const { return layers_.empty(); }
    double value(double x_N) const;
    double dxn(double x_N) const;
    /// Profile after Dirichlet diffusion for time tau.
    FarField diffused(double tau) const;
    /// Bound on |value| over the whole half-space.
    double bound() const;

    FarField& operator+=(const FarField& other);
    FarField& operator*=(double a);
    friend FarField operator+(FarField a, const FarField& b) { return a += b; }
    friend FarField operator*(double a, FarField f) { return f *= a; }
    bool operator==(const FarField&) const = default;

private:
    void add(ErfLayer layer);
    std::vector<ErfLayer> layers_;
};

/// Exterior behaviour of a boundary field: constant + sum of level * P(x' - center, 0, spread)
/// (N = 2 Poisson kernel). Closed under S2: S2(t) shifts every spread by t.
struct CauchyLayer {
    double level = 0.0;
    double spread = 0.0;
    double center = 0.0;
    bool operator==(const CauchyLayer&) const = default;
};

class BoundaryFarField {
public:
    BoundaryFarField(double constant = 0.0) : constant_(constant) {}

    double constant() const { return constant_; }
    const std::vector<CauchyLayer>& layers() const { return layers_; }
    bool is_zero() const { return constant_ == 0.0 && layers_.empty(); }
    /// Profile value at lateral position x'.
    double value(double x_prime) const;
    /// Profile after S2(t).
    BoundaryFarField shifted(double t) const;
    /// d/dt of the shifted profile, at t = 0 (constants drop out).
    double rate(double x_prime) const;
    void add_layer(double level, double spread, double center = 0.0);

    BoundaryFarField& operator+=(const BoundaryFarField& other);
    BoundaryFarField& operator*=(double a);
    friend BoundaryFarField operator+(BoundaryFarField a, const BoundaryFarField& b) { return a += b; }
    friend BoundaryFarField operator*(double a, BoundaryFarField f) { return f *= a; }
    bool operator==(const BoundaryFarField&) const = default;

private:
    double constant_ = 0.0;
    std::vector<CauchyLayer> layers_;
};

template <typename Scalar>
class BasicBoundaryField;

/// Scalar field on the grid nodes. values(k, i) sits at depth k, lateral i.
template <typename Scalar>
class BasicField {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    explicit BasicField(const HalfSpaceGrid& grid)
        : grid_(grid), values_(Matrix::Zero(grid.n_depth(), grid.n_lateral())) {}

    BasicField(const HalfSpaceGrid& grid, Matrix values, FarField far = {})
        : grid_(grid), values_(std::move(values)), far_(std::move(far)) {
        if (values_.rows() != grid.n_depth() || values_.cols() != grid.n_lateral())
            throw DomainError("Field: value matrix does not match grid shape");
        if (!values_.allFinite()) throw DomainError("Field: values must be finite");
    }

    /// Samples f(x', x_N) at every node.
    template <class F>
    static BasicField sample(const HalfSpaceGrid& grid, F&& f, FarField far = {}) {
        Matrix m(grid.n_depth(), grid.n_lateral());
        for (int i = 0; i < grid.n_lateral(); ++i)
            for (int k = 0; k < grid.n_depth(); ++k) m(k, i) = f(grid.lateral(i), grid.depth_at(k));
        return BasicField(grid, std::move(m), std::move(far));
    }

    const HalfSpaceGrid& grid() const { return grid_; }
    const Matrix& values() const { return values_; }
    Matrix& values() { return values_; }
    const FarField& far_field() const { return far_; }
    void set_far_field(FarField far) { far_ = std::move(far); }
    Scalar operator()(int k, int i) const { return values_(k, i); }

    BasicBoundaryField<Scalar> trace() const;

    BasicField& operator+=(const BasicField& o) {
        require_same_grid(grid_, o.grid_, "Field +=");
        values_ += o.values_;
        far_ += o.far_;
        return *this;
    }
    BasicField& operator-=(const BasicField& o) { return *this += Scalar(-1) * o; }
    BasicField& operator*=(Scalar a) {
        values_ *= a;
        far_ *= double(a);
        return *this;
    }
    friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
    friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
    friend BasicField operator*(Scalar a, BasicField f) { return f *= a; }

private:
    HalfSpaceGrid grid_;
    Matrix values_;
    FarField far_;
};

/// Scalar field on the boundary lattice, with a far-field profile outside [-R', R'].
template <typename Scalar>
class BasicBoundaryField {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit BasicBoundaryField(const HalfSpaceGrid& grid)
        : grid_(grid), values_(Vector::Zero(grid.n_lateral())) {}

    BasicBoundaryField(const HalfSpaceGrid& grid, Vector values, BoundaryFarField far = {})
        : grid_(grid), values_(std::move(values)), far_(std::move(far)) {
        if (values_.size() != grid.n_lateral())
            throw DomainError("BoundaryField: value vector does not match grid");
        if (!values_.allFinite() || !std::isfinite(far_.constant()))
            throw DomainError("BoundaryField: values must be finite");
    }

    template <class F>
    static BasicBoundaryField sample(const HalfSpaceGrid& grid, F&& f, BoundaryFarField far = {}) {
        Vector v(grid.n_lateral());
        for (int i = 0; i < grid.n_lateral(); ++i) v(i) = f(grid.lateral(i));
        return BasicBoundaryField(grid, std::move(v), far);
    }

    const HalfSpaceGrid& grid() const { return grid_; }
    const Vector& values() const { return values_; }
    Vector& values() { return values_; }
    const BoundaryFarField& far_field() const { return far_; }
    void set_far_field(BoundaryFarField far) { far_ = std::move(far); }
    /// Values minus the far-field profile at the nodes.
    Vector remainder() const {
        Vector r = values_;
        if (!far_.is_zero())
            for (Eigen::Index i = 0; i < r.size(); ++i) r(i) -= Scalar(far_.value(grid_.lateral(int(i))));
        return r;
    }
    Scalar operator()(int i) const { return values_(i); }

    BasicBoundaryField& operator+=(const BasicBoundaryField& o) {
        require_same_grid(grid_, o.grid_, "BoundaryField +=");
        values_ += o.values_;
        far_ += o.far_;
        return *this;
    }
    BasicBoundaryField& operator-=(const BasicBoundaryField& o) { return *this += Scalar(-1) * o; }
    BasicBoundaryField& operator*=(Scalar a) {
        values_ *= a;
        far_ *= double(a);
        return *this;
    }
    friend BasicBoundaryField operator+(BasicBoundaryField a, const BasicBoundaryField& b) { return a += b; }
    friend BasicBoundaryField operator-(BasicBoundaryField a, const BasicBoundaryField& b) { return a -= b; }
    friend BasicBoundaryField operator*(Scalar a, BasicBoundaryField f) { return f *= a; }

private:
    HalfSpaceGrid grid_;
    Vector values_;
    BoundaryFarField far_;
};

template <typename Scalar>
BasicBoundaryField<Scalar> BasicField<Scalar>::trace() const {
    return BasicBoundaryField<Scalar>(grid_, values_.row(0).transpose(), BoundaryFarField(far_.value(0.0)));
}

using Field = BasicField<double>;
using BoundaryField = BasicBoundaryField<double>;

/// A field together with its x_N derivative.
struct FieldWithDxn {
    Field value;
    Field dxn;

    FieldWithDxn& operator+=(const FieldWithDxn& o) {
        value += o.value;
        dxn += o.dxn;
        return *this;
    }
    FieldWithDxn& operator-=(const FieldWithDxn& o) {
        value -= o.value;
        dxn -= o.dxn;
        return *this;
    }
    friend FieldWithDxn operator*(double a, FieldWithDxn f) {
        f.value *= a;
        f.dxn *= a;
        return f;
    }
};

double sup_norm(const Field& f);
double sup_norm(const BoundaryField& f);
/// Max |f| over nodes with x_N strictly below L_strip.
double strip_sup_norm(const Field& f, double L_strip);
/// (-3 f_0 + 4 f_1 - f_2) / (2 h_N) at every boundary node.
BoundaryField boundary_normal_derivative(const Field& f);

inline double magnitude(const Field& f) { return sup_norm(f); }
inline double magnitude(const BoundaryField& f) { return sup_norm(f); }
inline double magnitude(const FieldWithDxn& f) { return std::max(sup_norm(f.value), sup_norm(f.dxn)); }

/// Flat CSV: one header row "N,R',L,n',n_depth[,far-field...]" then one row per
/// node. Doubles are written with 17 significant digits so reading back is exact.
/// Far-field terms: (level, time) pairs for fields; the constant followed by
/// (level, spread, center) triples for boundary fields.
void write_field_csv(std::ostream& out, const Field& f);
void write_field_csv(std::ostream& out, const BoundaryField& f);
Field read_field_csv(std::istream& in);
BoundaryField read_boundary_csv(std::istream& in);

}  // namespace dynbc
