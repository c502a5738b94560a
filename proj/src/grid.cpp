#include "dynbc/grid.hpp"

#include <cstdio>
#include <numbers>
#include <istream>
#include <ostream>
#include <sstream>

#include "dynbc/kernels.hpp"

namespace dynbc {

HalfSpaceGrid::HalfSpaceGrid(int N, double lateral_radius, double depth, int n_lateral, int n_depth)
    : N_(N), R_(lateral_radius), L_(depth), n_lat_(n_lateral), n_dep_(n_depth) {
    if (N != 2) throw DomainError("HalfSpaceGrid: only N = 2 grids are implemented");
    if (!(lateral_radius > 0) || !(depth > 0) || !std::isfinite(lateral_radius) || !std::isfinite(depth))
        throw DomainError("HalfSpaceGrid: R' and L must be positive and finite");
    if (n_lateral < 3 || n_lateral % 2 == 0) throw DomainError("HalfSpaceGrid: n' must be odd and >= 3");
    if (n_depth < 2) throw DomainError("HalfSpaceGrid: n_depth must be >= 2");
}

Eigen::VectorXd HalfSpaceGrid::lateral_nodes() const {
    Eigen::VectorXd x(n_lat_);
    for (int i = 0; i < n_lat_; ++i) x(i) = lateral(i);
    return x;
}

Eigen::VectorXd HalfSpaceGrid::depth_nodes() const {
    Eigen::VectorXd y(n_dep_);
    for (int k = 0; k < n_dep_; ++k) y(k) = depth_at(k);
    return y;
}

std::pair<int, int> HalfSpaceGrid::nearest(double x_prime, double x_N) const {
    const int i = static_cast<int>(std::lround((x_prime + R_) / lateral_step()));
    const int k = static_cast<int>(std::lround(x_N / depth_step()));
    return {std::clamp(i, 0, n_lat_ - 1), std::clamp(k, 0, n_dep_ - 1)};
}

void require_same_grid(const HalfSpaceGrid& a, const HalfSpaceGrid& b, const char* where) {
    if (!(a == b)) throw DomainError(std::string(where) + ": fields live on different grids");
}

FarField FarField::constant(double c) {
    FarField f;
    f.add({c, 0.0});
    return f;
}

void FarField::add(ErfLayer layer) {
    if (layer.level == 0.0) return;
    for (auto it = layers_.begin(); it != layers_.end(); ++it) {
        if (it->time == layer.time) {
            it->level += layer.level;
            if (it->level == 0.0) layers_.erase(it);
            return;
        }
    }
    layers_.push_back(layer);
}

double FarField::value(double x_N) const {
    double v = 0.0;
    for (const auto& l : layers_)
        v += l.time == 0.0 ? l.level : l.level * std::erf(x_N / (2.0 * std::sqrt(l.time)));
    return v;
}

double FarField::dxn(double x_N) const {
    double v = 0.0;
    for (const auto& l : layers_)
        if (l.time > 0.0)
            v += l.level * std::exp(-x_N * x_N / (4.0 * l.time)) / std::sqrt(std::numbers::pi * l.time);
    return v;
}

FarField FarField::diffused(double tau) const {
    FarField out;
    for (const auto& l : layers_) out.add({l.level, l.time + tau});
    return out;
}

double FarField::bound() const {
    double b = 0.0;
    for (const auto& l : layers_) b += std::abs(l.level);
    return b;
}

FarField& FarField::operator+=(const FarField& other) {
    for (const auto& l : other.layers_) add(l);
    return *this;
}

FarField& FarField::operator*=(double a) {
    if (a == 0.0) {
        layers_.clear();
        return *this;
    }
    for (auto& l : layers_) l.level *= a;
    return *this;
}

double BoundaryFarField::value(double x_prime) const {
    double v = constant_;
    if (!layers_.empty()) {
        const double c2 = normalization_constant(2);
        for (const auto& l : layers_) {
            const double x = x_prime - l.center;
            v += l.level * c2 * l.spread / (l.spread * l.spread + x * x);
        }
    }
    return v;
}

double BoundaryFarField::rate(double x_prime) const {
    double v = 0.0;
    const double c2 = normalization_constant(2);
    for (const auto& l : layers_) {
        const double s2 = l.spread * l.spread, x2 = (x_prime - l.center) * (x_prime - l.center);
        v += l.level * c2 * (x2 - s2) / ((s2 + x2) * (s2 + x2));
    }
    return v;
}

BoundaryFarField BoundaryFarField::shifted(double t) const {
    BoundaryFarField out(constant_);
    for (const auto& l : layers_) out.add_layer(l.level, l.spread + t, l.center);
    return out;
}

void BoundaryFarField::add_layer(double level, double spread, double center) {
    if (level == 0.0) return;
    if (!(spread > 0.0)) throw DomainError("BoundaryFarField: layer spread must be positive");
    for (auto it = layers_.begin(); it != layers_.end(); ++it) {
        if (it->spread == spread && it->center == center) {
            it->level += level;
            if (it->level == 0.0) layers_.erase(it);
            return;
        }
    }
    layers_.push_back({level, spread, center});
}

BoundaryFarField& BoundaryFarField::operator+=(const BoundaryFarField& other) {
    constant_ += other.constant_;
    for (const auto& l : other.layers_) add_layer(l.level, l.spread, l.center);
    return *this;
}

BoundaryFarField& BoundaryFarField::operator*=(double a) {
    constant_ *= a;
    if (a == 0.0) layers_.clear();
    for (auto& l : layers_) l.level *= a;
    return *this;
}

double sup_norm(const Field& f) {
    if (f.values().size() == 0) throw DomainError("sup_norm: empty field");
    return f.values().cwiseAbs().maxCoeff();
}

double sup_norm(const BoundaryField& f) {
    if (f.values().size() == 0) throw DomainError("sup_norm: empty field");
    return f.values().cwiseAbs().maxCoeff();
}

double strip_sup_norm(const Field& f, double L_strip) {
    const HalfSpaceGrid& g = f.grid();
    if (!(L_strip > 0)) throw DomainError("strip_sup_norm: strip depth must be positive");
    if (L_strip > g.depth()) throw DomainError("strip_sup_norm: strip deeper than the grid");
    double m = 0.0;
    for (int k = 0; k < g.n_depth() && g.depth_at(k) < L_strip; ++k)
        m = std::max(m, f.values().row(k).cwiseAbs().maxCoeff());
    return m;
}

BoundaryField boundary_normal_derivative(const Field& f) {
    const HalfSpaceGrid& g = f.grid();
    if (g.n_depth() < 4) throw DomainError("boundary_normal_derivative: need at least 4 depth nodes");
    const auto& v = f.values();
    Eigen::VectorXd d = (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)).transpose() / (2.0 * g.depth_step());
    return BoundaryField(g, std::move(d));
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_header(std::ostream& out, const HalfSpaceGrid& g) {
    out << g.dim() << ',' << fmt(g.lateral_radius()) << ',' << fmt(g.depth()) << ',' << g.n_lateral()
        << ',' << g.n_depth();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw DomainError("field csv: bad number '" + s + "'");
    }
    if (pos != s.size()) throw DomainError("field csv: bad number '" + s + "'");
    return v;
}

HalfSpaceGrid read_header(const std::vector<std::string>& h) {
    if (h.size() < 5) throw DomainError("field csv: header needs N, R', L, n', n_depth");
    return HalfSpaceGrid(std::stoi(h[0]), parse_double(h[1]), parse_double(h[2]), std::stoi(h[3]),
                         std::stoi(h[4]));
}

}  // namespace

void write_field_csv(std::ostream& out, const Field& f) {
    const HalfSpaceGrid& g = f.grid();
    write_header(out, g);
    for (const auto& l : f.far_field().layers()) out << ',' << fmt(l.level) << ',' << fmt(l.time);
    out << '\n';
    for (int k = 0; k < g.n_depth(); ++k)
        for (int i = 0; i < g.n_lateral(); ++i)
            out << fmt(g.lateral(i)) << ',' << fmt(g.depth_at(k)) << ',' << fmt(f(k, i)) << '\n';
}

void write_field_csv(std::ostream& out, const BoundaryField& f) {
    const HalfSpaceGrid& g = f.grid();
    write_header(out, g);
    out << ',' << fmt(f.far_field().constant());
    for (const auto& l : f.far_field().layers()) out << ',' << fmt(l.level) << ',' << fmt(l.spread) << ',' << fmt(l.center);
    out << '\n';
    for (int i = 0; i < g.n_lateral(); ++i) out << fmt(g.lateral(i)) << ',' << fmt(f(i)) << '\n';
}

Field read_field_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DomainError("field csv: missing header");
    const auto h = split_csv(line);
    const HalfSpaceGrid g = read_header(h);
    if ((h.size() - 5) % 2 != 0) throw DomainError("field csv: far-field terms come in pairs");
    FarField far;
    for (std::size_t j = 5; j < h.size(); j += 2) {
        FarField layer = FarField::constant(parse_double(h[j]));
        far += layer.diffused(parse_double(h[j + 1]));
    }
    Field::Matrix m(g.n_depth(), g.n_lateral());
    for (int k = 0; k < g.n_depth(); ++k)
        for (int i = 0; i < g.n_lateral(); ++i) {
            if (!std::getline(in, line)) throw DomainError("field csv: truncated body");
            const auto r = split_csv(line);
            if (r.size() != 3) throw DomainError("field csv: expected x',x_N,value rows");
            m(k, i) = parse_double(r[2]);
        }
    return Field(g, std::move(m), std::move(far));
}

BoundaryField read_boundary_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DomainError("boundary csv: missing header");
    const auto h = split_csv(line);
    const HalfSpaceGrid g = read_header(h);
    BoundaryFarField far(h.size() > 5 ? parse_double(h[5]) : 0.0);
    if (h.size() > 5 && (h.size() - 6) % 3 != 0) throw DomainError("boundary csv: far-field layers come in triples");
    for (std::size_t j = 6; j + 2 < h.size(); j += 3)
        far.add_layer(parse_double(h[j]), parse_double(h[j + 1]), parse_double(h[j + 2]));
    Eigen::VectorXd v(g.n_lateral());
    for (int i = 0; i < g.n_lateral(); ++i) {
        if (!std::getline(in, line)) throw DomainError("boundary csv: truncated body");
        const auto r = split_csv(line);
        if (r.size() != 2) throw DomainError("boundary csv: expected x',value rows");
        v(i) = parse_double(r[1]);
    }
    return BoundaryField(g, std::move(v), far);
}

}  // namespace dynbc
