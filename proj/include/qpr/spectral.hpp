#pragma once

#include <complex>
#include <vector>

#include "qpr/amplitude.hpp"
#include "qpr/grid.hpp"

namespace qpr {

// Fourier coefficients c(omega) of an amplitude, one per omega node. The
// transform pair is asymmetric:
//   c(w)   = 1/(2 pi) * integral psi(r) exp(-i w r) dr
//   psi(r) =            integral c(w)  exp(+i w r) dw
struct SpectrumGrid {
    UniformGrid omega;
    std::vector<std::complex<double>> coefficients;

    // Trapezoid integral of |c|^2. Under this convention 2 pi * weight()
    // equals the norm of the source amplitude.
    double weight() const;
};

enum class VolumeMethod { spectral, realspace };

struct VolumeReport {
    double realized = 0.0;   // expected realized volume Q
    double potential = 0.0;  // expected latent volume V
    double intrinsic = 0.0;  // Q + V
};

// Largest modulus allowed at the edge nodes of a grid for the transforms.
inline constexpr double kEdgeDecay = 1e-8;

// Omega grid matched to an r grid [-L, L]: a state spanning 12 standard
// widths in r spans the same number of widths in omega, and the omega
// spacing leaves the periodic images of the inverse transform far outside
// [-L, L].
UniformGrid default_omega_grid(const UniformGrid& r_grid);

// Throws truncation_error when psi has not decayed below kEdgeDecay at both
// ends of its grid.
SpectrumGrid decompose(const AmplitudeGrid& psi, const UniformGrid& omega);
SpectrumGrid decompose(const AmplitudeGrid& psi);

// Inverse transform onto r_grid. Throws truncation_error when c has not
// decayed at the ends of its omega grid.
AmplitudeGrid reconstruct(const SpectrumGrid& c, const UniformGrid& r_grid);

// Expected realized volume for a normalized amplitude and volume scale h.
//
// spectral:  integral of (h/2) w^2 |c(w)|^2 dw / integral |c(w)|^2 dw
// realspace: trapezoid of Re(psi* (-h/2) psi'') with the three-point
//            stencil; the two boundary nodes contribute nothing.
//
// Throws domain_error for h <= 0 or an amplitude whose norm is off by more
// than 1e-6.
double realized_volume(const AmplitudeGrid& psi, double h,
                       VolumeMethod method = VolumeMethod::spectral);

// Expected latent volume: trapezoid of (alpha/2 r^2 + delta/4 r^4) |psi|^2.
double potential_volume(const AmplitudeGrid& psi, double alpha, double delta);

VolumeReport intrinsic_volume(const AmplitudeGrid& psi, double h, double alpha, double delta,
                              VolumeMethod method = VolumeMethod::spectral);

}  // namespace qpr
