#include "qpr/amplitude.hpp"

#include <cmath>
#include <numbers>

#include "qpr/errors.hpp"

namespace qpr {

Amplitude::Amplitude(double modulus_, double phase_) : modulus(modulus_), phase(phase_) {
    if (!(modulus_ >= 0.0) || !std::isfinite(modulus_))
        throw domain_error("amplitude modulus must be finite and non-negative");
    if (!std::isfinite(phase_)) throw domain_error("amplitude phase must be finite");
    if (modulus_ == 0.0) phase = 0.0;
}

Amplitude Amplitude::from_complex(std::complex<double> z) {
    const double m = std::abs(z);
    return {m, m == 0.0 ? 0.0 : std::arg(z)};
}

Amplitude superpose(std::span<const Amplitude> parts) {
    if (parts.empty()) throw domain_error("superpose: no amplitudes given");
    std::complex<double> sum{0.0, 0.0};
    for (const auto& p : parts) sum += p.to_complex();
    return Amplitude::from_complex(sum);
}

double interference_density(const Amplitude& first, const Amplitude& second) {
    const double v = first.density() + second.density() +
                     2.0 * first.modulus * second.modulus * std::cos(first.phase - second.phase);
    // cancellation can leave -1e-16 behind
    return v < 0.0 ? 0.0 : v;
}

Components components(const Amplitude& psi) {
    return {psi.modulus * std::cos(psi.phase), psi.modulus * std::sin(psi.phase)};
}

Amplitude from_components(const Components& c) {
    return Amplitude::from_complex({c.rebalancing, c.sentiment});
}

bool same_phase(const Amplitude& x, const Amplitude& y, double tol) {
    if (x.modulus == 0.0 || y.modulus == 0.0) return true;
    const double two_pi = 2.0 * std::numbers::pi;
    double d = std::remainder(x.phase - y.phase, two_pi);
    return std::abs(d) <= tol;
}

AmplitudeGrid::AmplitudeGrid(UniformGrid grid, std::vector<Amplitude> values)
    : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (grid_.n < 3 || grid_.n % 2 == 0)
        throw domain_error("amplitude grid needs an odd node count >= 3");
    if (grid_.lo != -grid_.hi) throw domain_error("amplitude grid must be symmetric about 0");
    if (values_.size() != grid_.n) throw domain_error("amplitude grid: value count != node count");
}

AmplitudeGrid AmplitudeGrid::sample(const UniformGrid& grid,
                                    const std::function<std::complex<double>(double)>& psi) {
    const auto r = grid.nodes();
    std::vector<Amplitude> values(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) values[i] = Amplitude::from_complex(psi(r[i]));
    return {grid, std::move(values)};
}

AmplitudeGrid AmplitudeGrid::from_complex(const UniformGrid& grid,
                                          std::span<const std::complex<double>> values) {
    std::vector<Amplitude> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = Amplitude::from_complex(values[i]);
    return {grid, std::move(out)};
}

std::vector<std::complex<double>> AmplitudeGrid::to_complex() const {
    std::vector<std::complex<double>> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].to_complex();
    return out;
}

std::vector<double> AmplitudeGrid::densities() const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].density();
    return out;
}

double AmplitudeGrid::norm_squared() const { return trapezoid(densities(), grid_.spacing()); }

bool AmplitudeGrid::is_normalized(double tol) const { return std::abs(norm_squared() - 1.0) <= tol; }

AmplitudeGrid AmplitudeGrid::normalized() const {
    const double norm2 = norm_squared();
    if (!(norm2 > 0.0)) throw domain_error("cannot normalize a zero amplitude");
    const double scale = 1.0 / std::sqrt(norm2);
    std::vector<Amplitude> out(values_);
    for (auto& a : out) a.modulus *= scale;
    return {grid_, std::move(out)};
}

}  // namespace qpr
