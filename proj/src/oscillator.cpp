#include "qpr/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qpr/errors.hpp"
#include "qpr/tridiagonal.hpp"

namespace qpr {
namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw domain_error(std::string(name) + " must be finite");
}

void require_harmonic(int n, const ModelParams& params) {
    if (params.delta() != 0.0)
        throw domain_error("harmonic solution requires delta = 0; use the anharmonic path");
    if (n < 0 || n > kMaxHarmonicLevel)
        throw domain_error("harmonic level must be in [0, " + std::to_string(kMaxHarmonicLevel) +
                           "]");
}

// log of A_n^2 = (alpha/h)^(1/4) / (2^n n! sqrt(pi))
double log_norm_squared(int n, const ModelParams& params) {
    return 0.25 * std::log(params.alpha() / params.h()) - n * std::numbers::ln2 -
           std::lgamma(n + 1.0) - 0.5 * std::log(std::numbers::pi);
}

// Three-point operator on the interior nodes; psi = 0 at both ends.
SymTridiagonal build_operator(double lambda, const UniformGrid& xi) {
    const double dx = xi.spacing();
    const double inv = 1.0 / (dx * dx);
    const std::size_t m = xi.n - 2;
    SymTridiagonal t;
    t.diag.resize(m);
    t.off.assign(m > 0 ? m - 1 : 0, -inv);
    const auto nodes = xi.nodes();
    for (std::size_t i = 0; i < m; ++i) {
        const double x2 = nodes[i + 1] * nodes[i + 1];
        t.diag[i] = 2.0 * inv + x2 + lambda * x2 * x2;
    }
    return t;
}

UniformGrid refined(const UniformGrid& g) { return {g.lo, g.hi, 2 * g.n - 1}; }

}  // namespace

ModelParams::ModelParams(double h, double alpha, double delta)
    : h_(h), alpha_(alpha), delta_(delta) {
    require_finite(h, "h");
    require_finite(alpha, "alpha");
    require_finite(delta, "delta");
    if (!(h > 0.0)) throw domain_error("h must be positive");
    if (!(alpha > 0.0)) throw domain_error("alpha must be positive");
}

double ModelParams::lambda() const { return delta_ / (2.0 * alpha_) * std::sqrt(h_ / alpha_); }
double ModelParams::sigma() const { return std::pow(h_ / (4.0 * alpha_), 0.25); }
double ModelParams::xi_per_r() const { return std::pow(alpha_ / h_, 0.25); }
double ModelParams::energy_scale() const { return 0.5 * std::sqrt(alpha_ * h_); }

ModelParams SdgParams::model(double h) const {
    for (double v : {a, b, c, lambda_a, lambda_c})
        if (!(v >= 0.0) || !std::isfinite(v))
            throw domain_error("SDG coefficients must be finite and non-negative");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw domain_error("gamma must be positive");
    if (!(alpha() > 0.0)) throw domain_error("a + b - c*gamma must be positive");
    return {h, alpha(), delta()};
}

EnergyLevel make_level(int n, double omega, const ModelParams& params) {
    return {n, omega, params.energy_scale() * omega};
}

UniformGrid default_return_grid(const ModelParams& params) {
    return UniformGrid::symmetric(12.0 * params.sigma(), 4097);
}

double hermite(int n, double xi) {
    if (n < 0 || n > kMaxHermiteOrder)
        throw domain_error("hermite order must be in [0, " + std::to_string(kMaxHermiteOrder) + "]");
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 2.0 * xi;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * xi * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

EnergyLevel harmonic_level(int n, const ModelParams& params) {
    if (params.delta() != 0.0)
        throw domain_error("harmonic levels require delta = 0; use anharmonic_levels");
    if (n < 0) throw domain_error("level index must be non-negative");
    return make_level(n, 2.0 * n + 1.0, params);
}

AmplitudeGrid harmonic_state(int n, const ModelParams& params) {
    return harmonic_state(n, params, default_return_grid(params));
}

AmplitudeGrid harmonic_state(int n, const ModelParams& params, const UniformGrid& grid) {
    require_harmonic(n, params);
    const double half_log_a2 = 0.5 * log_norm_squared(n, params);
    const double scale = params.xi_per_r();
    return AmplitudeGrid::sample(grid, [&](double r) -> std::complex<double> {
        const double xi = scale * r;
        const double hn = hermite(n, xi);
        if (hn == 0.0) return 0.0;
        const double mag = std::exp(half_log_a2 - 0.5 * xi * xi + std::log(std::abs(hn)));
        return hn < 0.0 ? -mag : mag;
    });
}

DensityGrid harmonic_density(int n, const ModelParams& params) {
    return harmonic_density(n, params, default_return_grid(params));
}

DensityGrid harmonic_density(int n, const ModelParams& params, const UniformGrid& grid) {
    require_harmonic(n, params);
    grid.validate();
    const double log_a2 = log_norm_squared(n, params);
    const double scale = params.xi_per_r();
    const auto r = grid.nodes();
    DensityGrid out{grid, std::vector<double>(grid.n)};
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double xi = scale * r[i];
        const double hn = hermite(n, xi);
        out.values[i] = hn == 0.0 ? 0.0 : std::exp(log_a2 - xi * xi + 2.0 * std::log(std::abs(hn)));
    }
    return out;
}

double anharmonic_ratio(int n, double lambda) {
    if (n < 0) throw domain_error("level index must be non-negative");
    require_finite(lambda, "lambda");
    const double beta = 4.0 / 3.0 * (1.0 + 2.0 * n / 3.0) * lambda;
    if (beta == 0.0) return 1.0;

    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    const double floor_beta = -2.0 / (3.0 * std::sqrt(3.0));
    if (beta < floor_beta)
        throw level_breakdown_error(
            n, "level " + std::to_string(n) + ": x^3 - x = " + std::to_string(beta) +
                   " has no root on the continuous branch (needs >= -2/(3 sqrt 3))");

    auto g = [beta](double x) { return x * x * x - x - beta; };
    // g is increasing on [1/sqrt3, inf); the branch root lies in (1, 1+beta)
    // for beta > 0 and in [1/sqrt3, 1) for beta < 0.
    double lo = beta > 0.0 ? 1.0 : inv_sqrt3;
    double hi = beta > 0.0 ? 1.0 + beta : 1.0;
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
         ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
    }
    double x = 0.5 * (lo + hi);
    // one Newton step away from the double root at the breakdown edge
    const double slope = 3.0 * x * x - 1.0;
    if (slope > 1e-6) {
        const double nx = x - g(x) / slope;
        if (std::abs(g(nx)) < std::abs(g(x))) x = nx;
    }
    if (std::abs(g(x)) > 1e-12)
        throw level_breakdown_error(n, "level " + std::to_string(n) + ": root not resolved");
    return x;
}

std::vector<EnergyLevel> anharmonic_levels(double lambda, int n_max, const ModelParams& params) {
    if (n_max < 0) throw domain_error("n_max must be non-negative");
    std::vector<EnergyLevel> out;
    out.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        out.push_back(make_level(n, (2.0 * n + 1.0) * anharmonic_ratio(n, lambda), params));
    return out;
}

NumericGrid default_numeric_grid(double lambda) {
    require_finite(lambda, "lambda");
    NumericGrid g;
    if (lambda < 0.0) g.half_width = std::min(g.half_width, std::sqrt(-1.0 / lambda));
    return g;
}

NumericSpectrum numeric_spectrum(double lambda, int n_max, const NumericGrid& grid,
                                 bool check_resolution) {
    require_finite(lambda, "lambda");
    if (n_max < 0) throw domain_error("n_max must be non-negative");
    if (grid.points < 5 || !(grid.half_width > 0.0))
        throw domain_error("numeric grid needs >= 5 points and a positive half width");
    const std::size_t count = static_cast<std::size_t>(n_max) + 1;
    if (count > grid.points - 2) throw domain_error("more levels requested than grid nodes");

    NumericSpectrum out;
    out.xi = UniformGrid::symmetric(grid.half_width, grid.points);
    out.lambda = lambda;

    const SymTridiagonal op = build_operator(lambda, out.xi);
    const auto eigenvalues = lowest_eigenvalues(op, count);

    out.refinement_shift = std::numeric_limits<double>::quiet_NaN();
    if (check_resolution) {
        const auto fine = lowest_eigenvalues(build_operator(lambda, refined(out.xi)), count);
        double shift = 0.0;
        for (std::size_t k = 0; k < count; ++k)
            shift = std::max(shift, std::abs(fine[k] - eigenvalues[k]));
        out.refinement_shift = shift;
        if (shift > kResolutionTolerance)
            throw resolution_error("eigenvalues moved by " + std::to_string(shift) +
                                   " under grid refinement; use more points");
    }

    // Central-well barrier for negative coupling: max of xi^2 + lambda xi^4 at
    // xi^2 = -1/(2 lambda).
    const bool bounded = lambda >= 0.0;
    const double barrier = bounded ? std::numeric_limits<double>::infinity() : -0.25 / lambda;
    const double barrier_xi = bounded ? 0.0 : std::sqrt(-0.5 / lambda);

    const double dx = out.xi.spacing();
    const auto nodes = out.xi.nodes();
    for (std::size_t k = 0; k < count; ++k) {
        const auto inner = eigenvector(op, eigenvalues[k]);
        NumericLevel level;
        level.omega = eigenvalues[k];
        level.state.assign(out.xi.n, 0.0);
        std::copy(inner.begin(), inner.end(), level.state.begin() + 1);

        double norm2 = 0.0;
        for (double v : level.state) norm2 += v * v;
        const double scale = 1.0 / std::sqrt(norm2 * dx);
        double peak = 0.0;
        for (double& v : level.state) {
            v *= scale;
            peak = std::max(peak, std::abs(v));
        }
        const auto first = std::find_if(level.state.begin(), level.state.end(),
                                        [&](double v) { return std::abs(v) > 1e-8 * peak; });
        if (first != level.state.end() && *first < 0.0)
            for (double& v : level.state) v = -v;

        if (!bounded) {
            double inside = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                if (std::abs(nodes[i]) < barrier_xi) inside += level.state[i] * level.state[i] * dx;
            level.physical = level.omega > 0.0 && level.omega < barrier && inside > 0.5;
        }
        out.levels.push_back(std::move(level));
    }
    return out;
}

DensityGrid density_from_state(const UniformGrid& xi, std::span<const double> state,
                               const ModelParams& params) {
    xi.validate();
    if (state.size() != xi.n) throw domain_error("state size does not match its grid");
    const double to_r = 1.0 / params.xi_per_r();
    DensityGrid out{{xi.lo * to_r, xi.hi * to_r, xi.n}, std::vector<double>(xi.n)};
    const double jacobian = params.xi_per_r();
    for (std::size_t i = 0; i < xi.n; ++i) out.values[i] = state[i] * state[i] * jacobian;
    return out;
}

DensityGrid mixture_density(std::span<const double> weights, std::span<const DensityGrid> levels) {
    if (weights.empty() || weights.size() != levels.size())
        throw domain_error("mixture needs one weight per density");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw domain_error("mixture weights must be finite and non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw domain_error("mixture weights must sum to 1");
    for (const auto& d : levels)
        if (!(d.grid == levels.front().grid) || d.values.size() != d.grid.n)
            throw domain_error("mixture components must share one grid");

    DensityGrid out{levels.front().grid, std::vector<double>(levels.front().grid.n, 0.0)};
    for (std::size_t k = 0; k < levels.size(); ++k)
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += weights[k] * levels[k].values[i];
    return out;
}

int count_modes(const DensityGrid& d, double prominence) {
    const auto& v = d.values;
    const std::size_t n = v.size();
    if (n < 3) return 0;

    struct Peak {
        std::size_t begin, end;  // plateau [begin, end]
    };
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < n;) {
        std::size_t j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;
        if (j + 1 < n && v[i - 1] < v[i] && v[j + 1] < v[i]) peaks.push_back({i, j});
        i = j + 1;
    }
    if (peaks.empty()) return 0;

    const double threshold = prominence * *std::max_element(v.begin(), v.end());
    int modes = 0;
    for (std::size_t p = 0; p < peaks.size(); ++p) {
        const std::size_t left_from = p == 0 ? 0 : peaks[p - 1].end;
        const std::size_t right_to = p + 1 == peaks.size() ? n - 1 : peaks[p + 1].begin;
        const double left_min =
            *std::min_element(v.begin() + left_from, v.begin() + peaks[p].begin + 1);
        const double right_min =
            *std::min_element(v.begin() + peaks[p].end, v.begin() + right_to + 1);
        if (v[peaks[p].begin] - std::max(left_min, right_min) > threshold) ++modes;
    }
    return modes;
}

}  // namespace qpr
