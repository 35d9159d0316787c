#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpr/oscillator.hpp"

namespace qpr {

using Date = std::chrono::year_month_day;

// Strict YYYY-MM-DD. Throws parse_error (line 0) on anything else.
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

struct DailyBar {
    Date date;
    double open = 0.0;
    std::optional<double> high;
    std::optional<double> low;
    double close = 0.0;
    double volume = 0.0;
};

inline constexpr std::string_view kBarsHeader = "date,open,high,low,close,volume";

// Reads the bars CSV: header exactly kBarsHeader, one bar per line, high and
// low may be left empty. Bars come back sorted by date.
//   parse_error      malformed header, row, number or date (1-based line)
//   validation_error non-positive price, inconsistent high/low, negative
//                    volume, duplicate date
std::vector<DailyBar> load_bars(std::istream& in);
std::vector<DailyBar> load_bars_file(const std::string& path);

// Writes kBarsHeader and one row per bar with 17 significant digits.
void write_bars(std::ostream& out, std::span<const DailyBar> bars);

struct ReturnRecord {
    Date date;
    double r = 0.0;       // ln(close) - ln(open)
    double volume = 0.0;  // shares
};

std::vector<ReturnRecord> compute_returns(std::span<const DailyBar> bars);

inline constexpr std::size_t kTradingDaysPerYear = 243;
inline constexpr std::size_t kDefaultMinDays = 4 * kTradingDaysPerYear;

bool eligible(std::span<const ReturnRecord> records, std::size_t min_days = kDefaultMinDays);

struct DetectionConfig {
    double start_fraction = 0.05;
    double step_fraction = 0.05;
    int n_boot = 100;
    double alpha_sig = 0.05;
    std::size_t min_subset_days = 22;
    std::uint64_t seed = 0;
    unsigned threads = 1;  // bootstrap workers; never changes the result

    // Throws domain_error on out-of-range settings.
    void validate() const;
};

struct DetectionStep {
    double threshold = 0.0;
    std::size_t subset_size = 0;  // days with volume >= threshold
    double dip = 0.0;
    double p_value = 1.0;
};

struct DetectionResult {
    std::optional<double> e0;   // absent: ground level lies above v_max
    std::optional<double> eta;  // e0 / v_max; absent means "> 1"
    std::vector<DetectionStep> trace;
    double v_max = 0.0;
    double v_min = 0.0;
};

// Volume-threshold search for the ground trading level. Thresholds run
// v_min + (start + k step)(v_max - v_min); at each one the returns of days
// with volume >= threshold are tested for multimodality and the search stops
// at the first rejection. It gives up once fewer than min_subset_days remain.
// Step k bootstraps with derive_seed(config.seed, k).
//
// Throws domain_error with fewer than min_subset_days records or when all
// volumes are equal.
DetectionResult detect_ground_level(std::span<const ReturnRecord> records,
                                    const DetectionConfig& config);

// n draws by inverting the piecewise-linear CDF of the density's nodes.
std::vector<double> sample_returns(const DensityGrid& level, std::size_t n, std::uint64_t seed);

// Volume at the given percentile (0-100) of the records: the value at sorted
// index floor(pct/100 * n), clamped to the last record.
double volume_percentile(std::span<const ReturnRecord> records, double pct);

struct VolumeModel {
    double log_mean = 13.815510557964274;  // ln(1e6)
    double log_sd = 0.8;
};

// Synthetic market with a planted level switch: log-normal volumes, returns
// drawn from level `low_level` on days below the threshold percentile and
// from `high_level` on the rest. Harmonic densities when delta == 0,
// finite-difference eigenstates otherwise. Dates are consecutive days from
// 2000-01-01.
std::vector<ReturnRecord> synthesize_market(const ModelParams& params, int low_level,
                                            int high_level, double threshold_percentile,
                                            std::size_t n_days, std::uint64_t seed,
                                            const VolumeModel& volumes = {});

// Bars that reproduce the records: open 100, close 100 e^r, high/low the
// larger/smaller of the two.
std::vector<DailyBar> bars_from_returns(std::span<const ReturnRecord> records);

}  // namespace qpr
