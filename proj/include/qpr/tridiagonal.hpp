#pragma once

#include <cstddef>
#include <vector>

namespace qpr {

// Real symmetric tridiagonal matrix: diagonal of size n, off-diagonal of
// size n - 1.
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }
};

// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t count_below(const SymTridiagonal& t, double x);

// The lowest k eigenvalues in increasing order, each located by bisection on
// the Sturm count to full double precision.
std::vector<double> lowest_eigenvalues(const SymTridiagonal& t, std::size_t k);

// Unit-2-norm eigenvector for an eigenvalue computed by lowest_eigenvalues,
// by inverse iteration with a pivoted tridiagonal LU factorization.
std::vector<double> eigenvector(const SymTridiagonal& t, double eigenvalue);

}  // namespace qpr
