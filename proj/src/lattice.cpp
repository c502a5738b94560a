#include "dynbc/lattice.hpp"

#include <bit>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <unordered_map>

#include "dynbc/kernels.hpp"

namespace dynbc {

namespace {

double gauss(double z, double tau) {
    return std::exp(-z * z / (4.0 * tau)) / std::sqrt(4.0 * std::numbers::pi * tau);
}

double gauss_mass(double a, double b, double tau) {
    const double r = 0.5 / std::sqrt(tau);
    if (a >= 0.0) return 0.5 * (std::erfc(a * r) - std::erfc(b * r));
    if (b <= 0.0) return 0.5 * (std::erfc(-b * r) - std::erfc(-a * r));
    return 1.0 - 0.5 * std::erfc(-a * r) - 0.5 * std::erfc(b * r);
}

}  // namespace

CellMoments GaussFamily::cell(double a, double b) const {
    const double h = b - a;
    const double m0 = gauss_mass(a, b, tau);
    const double first = 2.0 * tau * (gauss(a, tau) - gauss(b, tau)) - a * m0;
    return {m0, first / h};
}

double GaussFamily::below(double z) const { return 0.5 * std::erfc(-z * 0.5 / std::sqrt(tau)); }
double GaussFamily::above(double z) const { return 0.5 * std::erfc(z * 0.5 / std::sqrt(tau)); }

CellMoments GaussSlopeFamily::cell(double a, double b) const {
    const double h = b - a;
    const double gb = gauss(b, tau);
    return {gauss(a, tau) - gb, gauss_mass(a, b, tau) / h - gb};
}

double GaussSlopeFamily::below(double z) const { return -gauss(z, tau); }
double GaussSlopeFamily::above(double z) const { return gauss(z, tau); }

namespace {

// log(p / q) for positive p, q with p - q = diff known exactly; log1p near 1
// keeps the small-ratio digits, the split logs survive p << q.
double log_ratio(double p, double q, double diff) {
    const double x = diff / q;
    return std::abs(x) < 0.5 ? std::log1p(x) : std::log(p) - std::log(q);
}

}  // namespace

CellMoments CauchyFamily::cell(double a, double b) const {
    const double c = normalization_constant(2);
    const double h = b - a;
    const double s2 = s * s;
    const double m0 = s2 + a * b > 0.0 ? c * std::atan(s * h / (s2 + a * b)) : below(b) - below(a);
    const double first = c * 0.5 * s * log_ratio(s2 + b * b, s2 + a * a, h * (a + b)) - a * m0;
    return {m0, first / h};
}

double CauchyFamily::below(double z) const { return normalization_constant(2) * std::atan2(s, -z); }
double CauchyFamily::above(double z) const { return normalization_constant(2) * std::atan2(s, z); }

CellMoments CauchyRateFamily::cell(double a, double b) const {
    const double c = normalization_constant(2);
    const double h = b - a;
    const double s2 = s * s;
    const double qa = s2 + a * a;
    const double qb = s2 + b * b;
    const double m0 = c * h * (a * b - s2) / (qa * qb);
    const double zk = c * (0.5 * log_ratio(qb, qa, h * (a + b)) - s2 * h * (a + b) / (qa * qb));
    return {m0, (zk - a * m0) / h};
}

double CauchyRateFamily::below(double z) const { return -normalization_constant(2) * z / (s * s + z * z); }
double CauchyRateFamily::above(double z) const { return normalization_constant(2) * z / (s * s + z * z); }

Eigen::MatrixXd lateral_matrix(const LatticeStencil& st, int n) {
    if (st.lo() > -n || st.hi() < n - 1) throw DomainError("lateral_matrix: stencil does not cover the lattice");
    const Eigen::VectorXd& fw = st.full_weights();
    Eigen::MatrixXd W(n, n);
    // column j holds lags j - i for i = 0..n-1, i.e. a reversed slice of fw
    for (int j = 1; j < n - 1; ++j) W.col(j) = fw.segment(j - (n - 1) - st.lo(), n).reverse();
    for (int i = 0; i < n; ++i) {
        W(i, 0) = st.first(-i);
        W(i, n - 1) = st.last(n - 1 - i);
    }
    return W;
}

Eigen::MatrixXd depth_matrix(const LatticeStencil& st, int n, double sign) {
    if (st.lo() > -n || st.hi() < 2 * n - 1) throw DomainError("depth_matrix: stencil does not cover the lattice");
    const Eigen::VectorXd& fw = st.full_weights();
    Eigen::MatrixXd D(n, n);
    for (int l = 1; l < n - 1; ++l)
        D.col(l) = fw.segment(l - (n - 1) - st.lo(), n).reverse() + sign * fw.segment(l - st.lo(), n);
    for (int k = 0; k < n; ++k) {
        D(k, 0) = st.first(-k) + sign * st.first(k);
        D(k, n - 1) = st.last(n - 1 - k) + sign * st.last(n - 1 + k);
    }
    return D;
}

Eigen::VectorXd apply_lateral(const LatticeStencil& st, const Eigen::VectorXd& in) {
    const int n = static_cast<int>(in.size());
    if (st.lo() > -n || st.hi() < n - 1) throw DomainError("apply_lateral: stencil does not cover the lattice");
    Eigen::VectorXd out(n);
    if (n < 3) {
        for (int i = 0; i < n; ++i) out(i) = st.first(-i) * in(0) + st.last(n - 1 - i) * in(n - 1);
        return out;
    }
    const Eigen::VectorXd& fw = st.full_weights();
    const auto inner = in.segment(1, n - 2);
    for (int i = 0; i < n; ++i)
        out(i) = fw.segment(1 - i - st.lo(), n - 2).dot(inner) + st.first(-i) * in(0) + st.last(n - 1 - i) * in(n - 1);
    return out;
}

struct StencilCache::Impl {
    struct Key {
        int family;
        std::uint64_t s;
        std::uint64_t h;
        int n;
        bool operator==(const Key&) const = default;
    };
    struct Hash {
        std::size_t operator()(const Key& k) const {
            std::size_t x = std::hash<std::uint64_t>{}(k.s);
            x ^= std::hash<std::uint64_t>{}(k.h) + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
            x ^= std::hash<int>{}(k.n * 4 + k.family) + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
            return x;
        }
    };

    std::size_t max_entries;
    mutable std::shared_mutex mutex;
    std::unordered_map<Key, std::shared_ptr<const LatticeStencil>, Hash> map;

    template <class K>
    std::shared_ptr<const LatticeStencil> get(int family, double s, double h, int n) {
        const Key key{family, std::bit_cast<std::uint64_t>(s), std::bit_cast<std::uint64_t>(h), n};
        {
            std::shared_lock lock(mutex);
            auto it = map.find(key);
            if (it != map.end()) return it->second;
        }
        auto st = std::make_shared<const LatticeStencil>(lateral_stencil(K{s}, h, n));
        std::unique_lock lock(mutex);
        if (map.size() >= max_entries) map.clear();
        return map.emplace(key, std::move(st)).first->second;
    }
};

StencilCache::StencilCache(std::size_t max_entries) : impl_(std::make_unique<Impl>()) {
    impl_->max_entries = max_entries;
}

StencilCache::~StencilCache() = default;

std::shared_ptr<const LatticeStencil> StencilCache::cauchy(double s, double h, int n) {
    if (!(s > 0)) throw DomainError("stencil cache: Poisson kernel parameter must be positive");
    return impl_->get<CauchyFamily>(0, s, h, n);
}

std::shared_ptr<const LatticeStencil> StencilCache::cauchy_rate(double s, double h, int n) {
    if (!(s > 0)) throw DomainError("stencil cache: Poisson kernel parameter must be positive");
    return impl_->get<CauchyRateFamily>(1, s, h, n);
}

std::size_t StencilCache::size() const {
    std::shared_lock lock(impl_->mutex);
    return impl_->map.size();
}

void StencilCache::clear() {
    std::unique_lock lock(impl_->mutex);
    impl_->map.clear();
}

StencilCache& stencil_cache() {
    static StencilCache cache;
    return cache;
}

BoundaryField convolve_boundary(const std::function<double(double)>& kernel, const BoundaryField& psi,
                                const std::function<double(double)>& tail_mass) {
    const HalfSpaceGrid& g = psi.grid();
    if (!psi.far_field().layers().empty())
        throw DomainError("convolve_boundary: reference path needs a constant far field");
    const double far = psi.far_field().constant();
    const int n = g.n_lateral();
    const double h = g.lateral_step();
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        const double tail = tail_mass(g.lateral(i));
        if (!(tail >= -1e-14 && tail <= 1.0 + 1e-14))
            throw DomainError("convolve_boundary: tail mass outside [0, 1]");
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
            acc += w * kernel(g.lateral(i) - g.lateral(j)) * psi(j);
        }
        out(i) = acc + far * tail;
    }
    return BoundaryField(g, std::move(out), far);
}

BoundaryField convolve_boundary(const std::function<double(double)>& kernel, const BoundaryField& psi,
                                double tail_mass) {
    return convolve_boundary(kernel, psi, [tail_mass](double) { return tail_mass; });
}

BoundaryField convolve_boundary(const LatticeStencil& st, double mass, const BoundaryField& psi) {
    if (!psi.far_field().layers().empty())
        throw DomainError("convolve_boundary: stencil path needs a constant far field");
    const double far = psi.far_field().constant();
    const Eigen::VectorXd centered = psi.values().array() - far;
    Eigen::VectorXd out = apply_lateral(st, centered);
    if (mass != 0.0) out.array() += mass * far;
    return BoundaryField(psi.grid(), std::move(out), mass * far);
}

Field convolve_halfspace(const std::function<double(double, double, double, double)>& kernel,
                         const Field& phi, const std::function<double(double, double)>& tail_mass) {
    const HalfSpaceGrid& g = phi.grid();
    double far = 0.0;
    for (const auto& l : phi.far_field().layers()) {
        if (l.time != 0.0) throw DomainError("convolve_halfspace: reference path needs a constant far field");
        far += l.level;
    }
    const int n = g.n_lateral();
    const int m = g.n_depth();
    const double h = g.lateral_step();
    const double hd = g.depth_step();
    Field::Matrix out(m, n);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int l = 0; l < m; ++l) {
                const double wl = (l == 0 || l == m - 1) ? 0.5 * hd : hd;
                for (int j = 0; j < n; ++j) {
                    const double wj = (j == 0 || j == n - 1) ? 0.5 * h : h;
                    acc += wl * wj * kernel(g.lateral(i), g.depth_at(k), g.lateral(j), g.depth_at(l)) * phi(l, j);
                }
            }
            out(k, i) = acc + far * tail_mass(g.lateral(i), g.depth_at(k));
        }
    return Field(g, std::move(out));
}

}  // namespace dynbc
