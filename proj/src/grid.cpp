#include "qpr/grid.hpp"

#include <cmath>
#include <string>

#include "qpr/errors.hpp"

namespace qpr {

double UniformGrid::at(std::size_t i) const {
    // Nodes are computed from both ends so that symmetric grids are exactly
    // antisymmetric about the midpoint.
    if (i == n - 1) return hi;
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    return lo + (hi - lo) * t;
}

std::vector<double> UniformGrid::nodes() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
    if (n % 2 == 1 && lo == -hi) {
        // exact mirror symmetry, including an exact zero at the centre
        const std::size_t mid = n / 2;
        out[mid] = 0.0;
        for (std::size_t i = 0; i < mid; ++i) out[n - 1 - i] = -out[i];
    }
    return out;
}

void UniformGrid::validate() const {
    if (n < 2) throw domain_error("grid needs at least 2 points");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw domain_error("grid bounds must be finite with hi > lo");
}

UniformGrid UniformGrid::symmetric(double half_width, std::size_t n) {
    UniformGrid g{-half_width, half_width, n};
    g.validate();
    return g;
}

double trapezoid(std::span<const double> f, double dx) {
    if (f.size() < 2) return 0.0;
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
    return sum * dx;
}

std::vector<double> cumulative_trapezoid(std::span<const double> f, double dx) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * dx * (f[i - 1] + f[i]);
    return out;
}

}  // namespace qpr
