#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qpr/amplitude.hpp"
#include "qpr/grid.hpp"

namespace qpr {

// Constants of the trading equation
//   -(h/2) psi'' + (alpha/2 r^2 + delta/4 r^4) psi = E psi.
// h is the volume per trading decision, alpha and delta the quadratic and
// quartic supply-demand-gap coefficients.
class ModelParams {
public:
    // Throws domain_error unless h > 0 and alpha > 0 (all finite).
    ModelParams(double h, double alpha, double delta = 0.0);

    double h() const { return h_; }
    double alpha() const { return alpha_; }
    double delta() const { return delta_; }

    // Dimensionless quartic coupling delta/(2 alpha) * sqrt(h/alpha).
    double lambda() const;
    // Standard deviation of the ground-level return density, (h/(4 alpha))^(1/4).
    double sigma() const;
    // xi = xi_per_r() * r, with xi_per_r() = (alpha/h)^(1/4).
    double xi_per_r() const;
    // Volume per unit of normalized level: E = energy_scale() * Omega.
    double energy_scale() const;

private:
    double h_;
    double alpha_;
    double delta_;
};

// Microfoundation of (alpha, delta) from the passive-trader classes: rational
// speculators (a, lambda_a), irrational speculators (b) and noise liquidity
// providers (c, gamma, lambda_c).
struct SdgParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double gamma = 1.0;
    double lambda_a = 0.0;
    double lambda_c = 0.0;

    double alpha() const { return a + b - c * gamma; }
    double delta() const { return gamma * lambda_c - lambda_a; }

    // Throws domain_error when the coefficients are invalid or alpha <= 0.
    ModelParams model(double h) const;
};

struct EnergyLevel {
    int n = 0;
    double omega = 0.0;  // normalized intrinsic volume
    double e_bar = 0.0;  // intrinsic volume, energy_scale() * omega
};

EnergyLevel make_level(int n, double omega, const ModelParams& params);

// Probability density of returns on a uniform grid.
struct DensityGrid {
    UniformGrid grid;
    std::vector<double> values;

    double integral() const { return trapezoid(values, grid.spacing()); }
};

// [-12 sigma, 12 sigma] with 4097 nodes.
UniformGrid default_return_grid(const ModelParams& params);

inline constexpr int kMaxHermiteOrder = 60;
inline constexpr int kMaxHarmonicLevel = 30;

// Physicists' Hermite polynomial H_n by three-term recurrence. Throws
// domain_error for n < 0 or n > kMaxHermiteOrder.
double hermite(int n, double xi);

// Harmonic levels: Omega_n = 2n + 1. Throws domain_error when delta != 0.
EnergyLevel harmonic_level(int n, const ModelParams& params);

// Real eigenfunction of level n in return coordinates, unit trapezoid norm.
AmplitudeGrid harmonic_state(int n, const ModelParams& params);
AmplitudeGrid harmonic_state(int n, const ModelParams& params, const UniformGrid& grid);

// f_n(r) = A_n^2 exp(-xi^2) H_n(xi)^2, A_n^2 = (alpha/h)^(1/4) / (2^n n! sqrt(pi)).
// Throws domain_error when delta != 0 or n is outside [0, kMaxHarmonicLevel].
DensityGrid harmonic_density(int n, const ModelParams& params);
DensityGrid harmonic_density(int n, const ModelParams& params, const UniformGrid& grid);

// Root x of x^3 - x = (4/3)(1 + 2n/3) lambda on the branch through x = 1 at
// lambda = 0. Throws level_breakdown_error when that branch has no root.
double anharmonic_ratio(int n, double lambda);

// Levels Omega_n = (2n + 1) x_n for n = 0..n_max. The energy scale comes from
// params; the coupling is lambda as given. Throws level_breakdown_error at the
// first level without a root.
std::vector<EnergyLevel> anharmonic_levels(double lambda, int n_max, const ModelParams& params);

struct NumericGrid {
    double half_width = 12.0;
    std::size_t points = 4097;
};

struct NumericLevel {
    double omega = 0.0;
    // Eigenvector on every node of the xi grid (zero at both ends), trapezoid
    // norm 1, first significant component positive.
    std::vector<double> state;
    // False when the level cannot belong to the central well of a
    // negative-coupling potential.
    bool physical = true;
};

struct NumericSpectrum {
    UniformGrid xi;
    double lambda = 0.0;
    std::vector<NumericLevel> levels;
    // Largest eigenvalue change against a grid with half the spacing; NaN when
    // the check was skipped.
    double refinement_shift = 0.0;
};

inline constexpr double kResolutionTolerance = 1e-3;

// The default grid for lambda >= 0. For lambda < 0 the half width is cut to
// the outer zero of xi^2 + lambda xi^4, sqrt(-1/lambda), when that is smaller,
// so the deep outer wells do not swamp the lowest grid eigenvalues.
NumericGrid default_numeric_grid(double lambda);

// Finite-difference solution of -phi'' + (xi^2 + lambda xi^4) phi = Omega phi
// with Dirichlet ends. Throws resolution_error when the lowest n_max + 1
// eigenvalues move by more than kResolutionTolerance on the refined grid.
NumericSpectrum numeric_spectrum(double lambda, int n_max, const NumericGrid& grid = {},
                                 bool check_resolution = true);

// Maps a xi-grid state to a return density with the Jacobian (alpha/h)^(1/4).
DensityGrid density_from_state(const UniformGrid& xi, std::span<const double> state,
                               const ModelParams& params);

// Pointwise convex combination. Throws domain_error on mismatched grids,
// negative weights, or weights not summing to 1 within 1e-12.
DensityGrid mixture_density(std::span<const double> weights, std::span<const DensityGrid> levels);

// Local maxima that rise more than prominence * max(d) above the higher of
// their two flanking minima. Plateaus count once.
int count_modes(const DensityGrid& d, double prominence = 0.01);

}  // namespace qpr
