#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qpr {

// Finite sample of returns, kept sorted ascending.
class Sample {
public:
    // Throws domain_error on empty input or non-finite values.
    explicit Sample(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

struct ModalityVerdict {
    double statistic = 0.0;  // observed dip
    double p_value = 1.0;    // (1 + #{bootstrap dip >= observed}) / (n_boot + 1)
    int n_boot = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kMinModalitySample = 4;

// Hartigan's dip: distance from the empirical CDF to the nearest unimodal
// CDF, found with the greatest-convex-minorant / least-concave-majorant
// sweep. Lies in [1/(2n), 1/4]. Throws domain_error for fewer than 4 values.
double dip_statistic(const Sample& s);

// Dip of already-sorted values (no validation beyond the size check).
double dip_statistic_sorted(std::span<const double> sorted);

// Calibrates the dip against n_boot uniform samples of the same size (the
// least favourable unimodal null). Replicate b draws from the stream
// derive_seed(seed, b), so the verdict does not depend on `threads`.
ModalityVerdict modality_pvalue(const Sample& s, int n_boot = 100, std::uint64_t seed = 0,
                                unsigned threads = 1);

}  // namespace qpr
