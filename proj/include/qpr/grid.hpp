#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qpr {

// Uniform 1-D grid with n nodes from lo to hi inclusive.
struct UniformGrid {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;

    double spacing() const { return (hi - lo) / static_cast<double>(n - 1); }
    double at(std::size_t i) const;
    std::vector<double> nodes() const;

    // Throws domain_error unless n >= 2 and hi > lo.
    void validate() const;

    // Symmetric grid [-half_width, half_width].
    static UniformGrid symmetric(double half_width, std::size_t n);

    bool operator==(const UniformGrid&) const = default;
};

// Composite trapezoid rule on uniform samples.
double trapezoid(std::span<const double> f, double dx);

// Running trapezoid integral; out[0] = 0 and out.back() is the full integral.
std::vector<double> cumulative_trapezoid(std::span<const double> f, double dx);

}  // namespace qpr
