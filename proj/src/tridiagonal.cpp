#include "qpr/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "qpr/errors.hpp"

namespace qpr {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Bounds {
    double lo;
    double hi;
};

Bounds gershgorin(const SymTridiagonal& t) {
    const std::size_t n = t.size();
    Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(t.off[i - 1]);
        if (i + 1 < n) radius += std::abs(t.off[i]);
        b.lo = std::min(b.lo, t.diag[i] - radius);
        b.hi = std::max(b.hi, t.diag[i] + radius);
    }
    return b;
}

double matrix_scale(const SymTridiagonal& t) {
    const Bounds b = gershgorin(t);
    return std::max({std::abs(b.lo), std::abs(b.hi), std::numeric_limits<double>::min()});
}

// Tridiagonal LU with partial pivoting (row interchanges), as in LAPACK's
// gttrf. U has up to two superdiagonals.
struct PivotedLU {
    std::vector<double> d, du, du2, dl;
    std::vector<bool> swapped;

    void solve(std::vector<double>& b) const {
        const std::size_t n = d.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!swapped[i]) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (std::size_t k = n; k-- > 2;) {
            const std::size_t i = k - 2;
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    }
};

PivotedLU factor_shifted(const SymTridiagonal& t, double shift) {
    const std::size_t n = t.size();
    const double tiny = kEps * matrix_scale(t);
    PivotedLU lu;
    lu.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) lu.d[i] = t.diag[i] - shift;
    lu.du = t.off;
    lu.dl = t.off;
    lu.du2.assign(n > 2 ? n - 2 : 0, 0.0);
    lu.swapped.assign(n > 1 ? n - 1 : 0, false);

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(lu.d[i]) >= std::abs(lu.dl[i])) {
            if (lu.d[i] == 0.0) lu.d[i] = tiny;
            const double fact = lu.dl[i] / lu.d[i];
            lu.dl[i] = fact;
            lu.d[i + 1] -= fact * lu.du[i];
        } else {
            const double fact = lu.d[i] / lu.dl[i];
            lu.d[i] = lu.dl[i];
            lu.dl[i] = fact;
            const double tmp = lu.du[i];
            lu.du[i] = lu.d[i + 1];
            lu.d[i + 1] = tmp - fact * lu.d[i + 1];
            if (i + 2 < n) {
                lu.du2[i] = lu.du[i + 1];
                lu.du[i + 1] = -fact * lu.du[i + 1];
            }
            lu.swapped[i] = true;
        }
    }
    if (lu.d[n - 1] == 0.0) lu.d[n - 1] = tiny;
    return lu;
}

void normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    for (double& x : v) x /= s;
}

}  // namespace

std::size_t count_below(const SymTridiagonal& t, double x) {
    const std::size_t n = t.size();
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, matrix_scale(t));
    std::size_t count = 0;
    double q = t.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

std::vector<double> lowest_eigenvalues(const SymTridiagonal& t, std::size_t k) {
    const std::size_t n = t.size();
    if (n == 0 || t.off.size() + 1 != n) throw domain_error("malformed tridiagonal matrix");
    if (k > n) throw domain_error("requested more eigenvalues than the matrix order");

    const Bounds b = gershgorin(t);
    const double scale = matrix_scale(t);
    std::vector<double> out(k);
    for (std::size_t j = 0; j < k; ++j) {
        double lo = j == 0 ? b.lo : out[j - 1];
        double hi = b.hi;
        // invariant: count_below(lo) <= j < count_below(hi)
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (hi - lo <= 2.0 * kEps * scale) break;
            if (count_below(t, mid) > j)
                hi = mid;
            else
                lo = mid;
        }
        out[j] = 0.5 * (lo + hi);
    }
    return out;
}

std::vector<double> eigenvector(const SymTridiagonal& t, double eigenvalue) {
    const std::size_t n = t.size();
    const PivotedLU lu = factor_shifted(t, eigenvalue);

    // deterministic, non-symmetric start so that no parity class is missed
    std::vector<double> v(n);
    std::uint64_t state = 0x9E3779B97F4A7C15ull;
    for (auto& x : v) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        x = 0.5 + static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    normalize(v);
    for (int it = 0; it < 4; ++it) {
        lu.solve(v);
        normalize(v);
    }
    return v;
}

}  // namespace qpr
