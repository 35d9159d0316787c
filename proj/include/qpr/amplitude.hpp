#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "qpr/grid.hpp"

namespace qpr {

// Active-trading-intention amplitude in polar form. The modulus is the
// intensity of the intention to trade at a given return, the phase its
// character: the real axis is position rebalancing (positive = adding), the
// imaginary axis is sentiment (positive = bearish).
//
// The phase is stored as given, not reduced to (-pi, pi]. A zero-modulus
// amplitude has phase 0 by convention.
struct Amplitude {
    double modulus = 0.0;
    double phase = 0.0;

    Amplitude() = default;
    // Throws domain_error on a negative or non-finite modulus.
    Amplitude(double modulus, double phase);

    static Amplitude from_complex(std::complex<double> z);
    std::complex<double> to_complex() const { return std::polar(modulus, phase); }

    // Probability density contributed by this amplitude.
    double density() const { return modulus * modulus; }
};

// Rational / emotional split of an amplitude.
struct Components {
    double rebalancing = 0.0;  // a = phi cos(theta)
    double sentiment = 0.0;    // b = phi sin(theta)
};

// Complex sum of the parts. Throws domain_error on empty input.
Amplitude superpose(std::span<const Amplitude> parts);

// Density of the two-party market including the interaction term
// 2 phi1 phi2 cos(theta1 - theta2).
double interference_density(const Amplitude& first, const Amplitude& second);

Components components(const Amplitude& psi);
Amplitude from_components(const Components& c);

// Phase equality modulo 2 pi. Amplitudes with zero modulus compare equal in
// phase to anything.
bool same_phase(const Amplitude& x, const Amplitude& y, double tol);

// Amplitude sampled on a grid that is symmetric about zero with an odd node
// count, so r = 0 is a node.
class AmplitudeGrid {
public:
    AmplitudeGrid(UniformGrid grid, std::vector<Amplitude> values);

    static AmplitudeGrid sample(const UniformGrid& grid,
                                const std::function<std::complex<double>(double)>& psi);
    static AmplitudeGrid from_complex(const UniformGrid& grid,
                                      std::span<const std::complex<double>> values);

    const UniformGrid& grid() const { return grid_; }
    std::span<const Amplitude> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    std::vector<std::complex<double>> to_complex() const;
    std::vector<double> densities() const;

    // Trapezoid integral of |psi|^2.
    double norm_squared() const;
    bool is_normalized(double tol = 1e-9) const;

    // Returns a copy scaled to unit norm. Throws domain_error for a zero state.
    AmplitudeGrid normalized() const;

private:
    UniformGrid grid_;
    std::vector<Amplitude> values_;
};

}  // namespace qpr
