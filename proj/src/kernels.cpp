#include "dynbc/kernels.hpp"

#include <map>
#include <mutex>

#include "dynbc/rules.hpp"

namespace dynbc {

namespace {

// Integral of (1 + |z|^2)^{-N/2} over R^{N-1}. In polar form with r = tan(theta)
// the radial integrand becomes sin^{N-2}(theta) on [0, pi/2].
double cauchy_mass(int N) {
    const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * (N - 1)) / std::tgamma(0.5 * (N - 1));
    const double radial = integrate_gl([N](double th) { return std::pow(std::sin(th), N - 2); },
                                       0.0, 0.5 * std::numbers::pi, 64);
    return sphere * radial;
}

}  // namespace

double normalization_constant(int N) {
    if (N < 2) throw DomainError("normalization_constant: N must be >= 2");
    static std::mutex mutex;
    static std::map<int, double> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    const double c = 1.0 / cauchy_mass(N);
    cache.emplace(N, c);
    return c;
}

}  // namespace dynbc
