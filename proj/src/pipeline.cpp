#include "qpr/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "qpr/errors.hpp"
#include "qpr/modality.hpp"
#include "qpr/rng.hpp"

namespace qpr {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_number(std::string_view field, std::size_t line, const char* name) {
    field = trim(field);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() ||
        !std::isfinite(v))
        throw parse_error(line, fmt::format("line {}: bad {} value '{}'", line, name, field));
    return v;
}

int parse_digits(std::string_view s) {
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return -1;
        v = v * 10 + (c - '0');
    }
    return v;
}

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw parse_error(0, fmt::format("bad date '{}' (expected YYYY-MM-DD)", text));
    const int y = parse_digits(text.substr(0, 4));
    const int m = parse_digits(text.substr(5, 2));
    const int d = parse_digits(text.substr(8, 2));
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (y < 0 || m < 0 || d < 0 || !date.ok())
        throw parse_error(0, fmt::format("bad date '{}' (expected YYYY-MM-DD)", text));
    return date;
}

std::string format_date(const Date& d) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                       static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

std::vector<DailyBar> load_bars(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;

    if (!std::getline(in, raw)) throw parse_error(1, "empty input: missing header");
    ++line_no;
    std::string_view header = raw;
    if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
    if (trim(header) != kBarsHeader)
        throw parse_error(1, fmt::format("line 1: header must be '{}'", kBarsHeader));

    std::vector<std::pair<DailyBar, std::size_t>> rows;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 6)
            throw parse_error(line_no, fmt::format("line {}: expected 6 fields, got {}", line_no,
                                                   fields.size()));
        DailyBar bar;
        try {
            bar.date = parse_date(fields[0]);
        } catch (const parse_error& e) {
            throw parse_error(line_no, fmt::format("line {}: {}", line_no, e.what()));
        }
        bar.open = parse_number(fields[1], line_no, "open");
        if (!trim(fields[2]).empty()) bar.high = parse_number(fields[2], line_no, "high");
        if (!trim(fields[3]).empty()) bar.low = parse_number(fields[3], line_no, "low");
        bar.close = parse_number(fields[4], line_no, "close");
        bar.volume = parse_number(fields[5], line_no, "volume");

        if (!(bar.open > 0.0) || !(bar.close > 0.0))
            throw validation_error(line_no,
                                   fmt::format("line {}: open and close must be positive", line_no));
        const double lo = std::min(bar.open, bar.close);
        const double hi = std::max(bar.open, bar.close);
        if (bar.low && !(*bar.low <= lo))
            throw validation_error(line_no, fmt::format("line {}: low above open/close", line_no));
        if (bar.high && !(*bar.high >= hi))
            throw validation_error(line_no, fmt::format("line {}: high below open/close", line_no));
        if (!(bar.volume >= 0.0))
            throw validation_error(line_no, fmt::format("line {}: negative volume", line_no));
        rows.emplace_back(bar, line_no);
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first.date < b.first.date; });
    std::vector<DailyBar> bars;
    bars.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first.date == rows[i - 1].first.date)
            throw validation_error(rows[i].second,
                                   fmt::format("line {}: duplicate date {}", rows[i].second,
                                               format_date(rows[i].first.date)));
        bars.push_back(rows[i].first);
    }
    return bars;
}

std::vector<DailyBar> load_bars_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    return load_bars(in);
}

void write_bars(std::ostream& out, std::span<const DailyBar> bars) {
    out << kBarsHeader << '\n';
    for (const auto& b : bars) {
        out << format_date(b.date) << ',' << fmt::format("{:.17g}", b.open) << ',';
        if (b.high) out << fmt::format("{:.17g}", *b.high);
        out << ',';
        if (b.low) out << fmt::format("{:.17g}", *b.low);
        out << ',' << fmt::format("{:.17g},{:.17g}", b.close, b.volume) << '\n';
    }
}

std::vector<ReturnRecord> compute_returns(std::span<const DailyBar> bars) {
    std::vector<ReturnRecord> out;
    out.reserve(bars.size());
    for (const auto& b : bars) out.push_back({b.date, std::log(b.close) - std::log(b.open), b.volume});
    return out;
}

bool eligible(std::span<const ReturnRecord> records, std::size_t min_days) {
    return records.size() >= min_days;
}

void DetectionConfig::validate() const {
    if (!(start_fraction > 0.0 && start_fraction < 1.0))
        throw domain_error("start_fraction must lie in (0, 1)");
    if (!(step_fraction > 0.0 && step_fraction < 1.0))
        throw domain_error("step_fraction must lie in (0, 1)");
    if (start_fraction + step_fraction > 1.0)
        throw domain_error("start_fraction + step_fraction must not exceed 1");
    if (n_boot < 1) throw domain_error("n_boot must be at least 1");
    if (!(alpha_sig > 0.0 && alpha_sig < 1.0)) throw domain_error("alpha_sig must lie in (0, 1)");
    if (min_subset_days < kMinModalitySample)
        throw domain_error("min_subset_days must be at least 4");
}

DetectionResult detect_ground_level(std::span<const ReturnRecord> records,
                                    const DetectionConfig& config) {
    config.validate();
    if (records.size() < config.min_subset_days)
        throw domain_error(fmt::format("need at least {} records, got {}", config.min_subset_days,
                                       records.size()));

    DetectionResult result;
    const auto [lo, hi] = std::minmax_element(
        records.begin(), records.end(),
        [](const ReturnRecord& a, const ReturnRecord& b) { return a.volume < b.volume; });
    result.v_min = lo->volume;
    result.v_max = hi->volume;
    const double range = result.v_max - result.v_min;
    if (!(range > 0.0)) throw domain_error("all volumes are equal; no threshold to search");

    std::vector<double> upper;
    upper.reserve(records.size());
    for (std::uint64_t k = 0;; ++k) {
        const double fraction = config.start_fraction + static_cast<double>(k) * config.step_fraction;
        const double threshold = result.v_min + fraction * range;

        upper.clear();
        for (const auto& rec : records)
            if (rec.volume >= threshold) upper.push_back(rec.r);
        if (upper.size() < config.min_subset_days) break;

        const auto verdict = modality_pvalue(Sample(upper), config.n_boot,
                                             derive_seed(config.seed, k), config.threads);
        result.trace.push_back({threshold, upper.size(), verdict.statistic, verdict.p_value});
        if (verdict.p_value < config.alpha_sig) {
            result.e0 = threshold;
            result.eta = threshold / result.v_max;
            break;
        }
    }
    return result;
}

std::vector<double> sample_returns(const DensityGrid& level, std::size_t n, std::uint64_t seed) {
    std::vector<double> out;
    if (n == 0) return out;
    level.grid.validate();
    if (level.values.size() != level.grid.n) throw domain_error("density size != grid size");
    for (double v : level.values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw domain_error("density must be finite and >= 0");

    auto cdf = cumulative_trapezoid(level.values, level.grid.spacing());
    const double total = cdf.back();
    if (!(total > 0.0)) throw domain_error("density integrates to zero");
    for (double& c : cdf) c /= total;

    const double dr = level.grid.spacing();
    Rng rng(seed);
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        // cdf[k] <= u < cdf[k + 1]
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) it = std::prev(cdf.end());
        const std::size_t k = static_cast<std::size_t>(it - cdf.begin()) - 1;
        const double frac = (u - cdf[k]) / (cdf[k + 1] - cdf[k]);
        out.push_back(level.grid.at(k) + frac * dr);
    }
    return out;
}

double volume_percentile(std::span<const ReturnRecord> records, double pct) {
    if (records.empty()) throw domain_error("no records");
    if (!(pct >= 0.0 && pct <= 100.0)) throw domain_error("percentile must lie in [0, 100]");
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.volume);
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(std::floor(pct / 100.0 * static_cast<double>(v.size())));
    return v[std::min(idx, v.size() - 1)];
}

namespace {

DensityGrid level_density(const ModelParams& params, int level) {
    if (params.delta() == 0.0) return harmonic_density(level, params);
    const auto spectrum = numeric_spectrum(params.lambda(), level, default_numeric_grid(params.lambda()));
    const auto& state = spectrum.levels.back();
    if (!state.physical)
        throw domain_error(fmt::format("level {} is not bound for lambda = {}", level,
                                       params.lambda()));
    return density_from_state(spectrum.xi, state.state, params);
}

}  // namespace

std::vector<ReturnRecord> synthesize_market(const ModelParams& params, int low_level,
                                            int high_level, double threshold_percentile,
                                            std::size_t n_days, std::uint64_t seed,
                                            const VolumeModel& volumes) {
    if (low_level < 0 || high_level < 0 || low_level > kMaxHarmonicLevel ||
        high_level > kMaxHarmonicLevel)
        throw domain_error(fmt::format("levels must lie in [0, {}]", kMaxHarmonicLevel));
    if (!(threshold_percentile >= 0.0 && threshold_percentile <= 100.0))
        throw domain_error("threshold percentile must lie in [0, 100]");
    if (!(volumes.log_sd > 0.0) || !std::isfinite(volumes.log_mean))
        throw domain_error("volume model needs a finite mean and positive spread");

    const DensityGrid low = level_density(params, low_level);
    const DensityGrid high = level_density(params, high_level);
    std::vector<ReturnRecord> records(n_days);
    if (n_days == 0) return records;

    Rng vol_rng(derive_seed(seed, 0));
    const std::chrono::sys_days start{std::chrono::year{2000} / 1 / 1};
    for (std::size_t i = 0; i < n_days; ++i) {
        records[i].date = Date{start + std::chrono::days{static_cast<long>(i)}};
        records[i].volume = std::exp(volumes.log_mean + volumes.log_sd * vol_rng.normal());
    }
    const double plant = volume_percentile(records, threshold_percentile);

    std::size_t n_low = 0;
    for (const auto& r : records) n_low += r.volume < plant ? 1 : 0;
    const auto low_draws = sample_returns(low, n_low, derive_seed(seed, 1));
    const auto high_draws = sample_returns(high, n_days - n_low, derive_seed(seed, 2));
    std::size_t il = 0, ih = 0;
    for (auto& r : records) r.r = r.volume < plant ? low_draws[il++] : high_draws[ih++];
    return records;
}

std::vector<DailyBar> bars_from_returns(std::span<const ReturnRecord> records) {
    std::vector<DailyBar> bars;
    bars.reserve(records.size());
    for (const auto& rec : records) {
        DailyBar b;
        b.date = rec.date;
        b.open = 100.0;
        b.close = 100.0 * std::exp(rec.r);
        b.high = std::max(b.open, b.close);
        b.low = std::min(b.open, b.close);
        b.volume = rec.volume;
        bars.push_back(b);
    }
    return bars;
}

}  // namespace qpr
