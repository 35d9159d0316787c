#include "qpr/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qpr/errors.hpp"

namespace qpr {
namespace {

constexpr double kNormTolerance = 1e-6;
constexpr std::size_t kDefaultOmegaPoints = 513;
// 12 widths in r times 12 widths in omega for a Gaussian whose |psi|^2 has
// standard deviation sigma: (12 sigma) * (12 / (sigma sqrt 2)).
const double kDualReach = 144.0 / std::numbers::sqrt2;

void require_edge_decay(double first, double last, const char* what) {
    if (first > kEdgeDecay || last > kEdgeDecay)
        throw truncation_error(std::string(what) + " has not decayed at the grid boundary");
}

void require_normalized(const AmplitudeGrid& psi) {
    const double n2 = psi.norm_squared();
    if (!(std::abs(n2 - 1.0) <= kNormTolerance))
        throw domain_error("amplitude is not normalized (norm^2 = " + std::to_string(n2) + ")");
}

// Trapezoid-weighted sum of samples[j] * exp(sign * i * k * x_j).
std::complex<double> weighted_transform(std::span<const std::complex<double>> samples,
                                        std::span<const double> x, double dx, double k,
                                        double sign) {
    std::complex<double> acc{0.0, 0.0};
    const std::size_t n = samples.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
        acc += w * samples[j] * std::polar(1.0, sign * k * x[j]);
    }
    return acc * dx;
}

}  // namespace

double SpectrumGrid::weight() const {
    std::vector<double> w2(coefficients.size());
    for (std::size_t i = 0; i < coefficients.size(); ++i) w2[i] = std::norm(coefficients[i]);
    return trapezoid(w2, omega.spacing());
}

UniformGrid default_omega_grid(const UniformGrid& r_grid) {
    const double half = 0.5 * (r_grid.hi - r_grid.lo);
    return UniformGrid::symmetric(kDualReach / half, kDefaultOmegaPoints);
}

SpectrumGrid decompose(const AmplitudeGrid& psi, const UniformGrid& omega) {
    omega.validate();
    const auto values = psi.values();
    require_edge_decay(values.front().modulus, values.back().modulus, "amplitude");

    const auto samples = psi.to_complex();
    const auto r = psi.grid().nodes();
    const auto w = omega.nodes();
    const double dr = psi.grid().spacing();

    SpectrumGrid out{omega, std::vector<std::complex<double>>(omega.n)};
    for (std::size_t k = 0; k < omega.n; ++k)
        out.coefficients[k] =
            weighted_transform(samples, r, dr, w[k], -1.0) / (2.0 * std::numbers::pi);
    return out;
}

SpectrumGrid decompose(const AmplitudeGrid& psi) {
    return decompose(psi, default_omega_grid(psi.grid()));
}

AmplitudeGrid reconstruct(const SpectrumGrid& c, const UniformGrid& r_grid) {
    c.omega.validate();
    if (c.coefficients.size() != c.omega.n)
        throw domain_error("spectrum: coefficient count != omega node count");
    require_edge_decay(std::abs(c.coefficients.front()), std::abs(c.coefficients.back()),
                       "spectrum");

    const auto w = c.omega.nodes();
    const auto r = r_grid.nodes();
    const double dw = c.omega.spacing();
    std::vector<std::complex<double>> values(r_grid.n);
    for (std::size_t j = 0; j < r_grid.n; ++j)
        values[j] = weighted_transform(c.coefficients, w, dw, r[j], +1.0);
    return AmplitudeGrid::from_complex(r_grid, values);
}

double realized_volume(const AmplitudeGrid& psi, double h, VolumeMethod method) {
    if (!(h > 0.0)) throw domain_error("realized_volume: h must be positive");
    require_normalized(psi);

    if (method == VolumeMethod::spectral) {
        const auto c = decompose(psi);
        const auto w = c.omega.nodes();
        std::vector<double> weight(w.size()), moment(w.size());
        for (std::size_t k = 0; k < w.size(); ++k) {
            weight[k] = std::norm(c.coefficients[k]);
            moment[k] = 0.5 * h * w[k] * w[k] * weight[k];
        }
        const double dw = c.omega.spacing();
        return trapezoid(moment, dw) / trapezoid(weight, dw);
    }

    const auto v = psi.to_complex();
    const double dr = psi.grid().spacing();
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const auto second = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dr * dr);
        sum += (std::conj(v[i]) * (-0.5 * h) * second).real();
    }
    return sum * dr;
}

double potential_volume(const AmplitudeGrid& psi, double alpha, double delta) {
    require_normalized(psi);
    const auto r = psi.grid().nodes();
    const auto vals = psi.values();
    std::vector<double> f(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double r2 = r[i] * r[i];
        f[i] = (0.5 * alpha * r2 + 0.25 * delta * r2 * r2) * vals[i].density();
    }
    return trapezoid(f, psi.grid().spacing());
}

VolumeReport intrinsic_volume(const AmplitudeGrid& psi, double h, double alpha, double delta,
                              VolumeMethod method) {
    VolumeReport out;
    out.realized = realized_volume(psi, h, method);
    out.potential = potential_volume(psi, alpha, delta);
    out.intrinsic = out.realized + out.potential;
    return out;
}

}  // namespace qpr
