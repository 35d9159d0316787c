#include "qpr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpr/errors.hpp"
#include "qpr/modality.hpp"
#include "qpr/oscillator.hpp"
#include "qpr/pipeline.hpp"

namespace qpr {
namespace {

using nlohmann::ordered_json;

std::string num(double v) { return fmt::format("{:.17g}", v); }

// Flag/value pairs in a fixed order, echoed into every output file.
class Invocation {
public:
    explicit Invocation(std::string command) : command_(std::move(command)) {}

    void add(const std::string& flag, std::string value) { items_.emplace_back(flag, std::move(value)); }
    void add(const std::string& flag, double value) { add(flag, num(value)); }
    void add(const std::string& flag, long long value) { add(flag, std::to_string(value)); }
    void add(const std::string& flag, unsigned long long value) { add(flag, std::to_string(value)); }

    std::string command_line() const {
        std::string s = "qpr " + command_;
        for (const auto& [flag, value] : items_) s += " " + flag + " " + value;
        return s;
    }

    ordered_json json() const {
        ordered_json j = ordered_json::object();
        for (const auto& [flag, value] : items_) j[flag] = value;
        return j;
    }

private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> items_;
};

// Writes to a file, or to the fallback stream for "-".
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {
        if (to_file()) {
            file_.open(path_, std::ios::binary | std::ios::trunc);
            if (!file_) throw io_error("cannot open '" + path_ + "' for writing");
        }
    }

    bool to_file() const { return !path_.empty() && path_ != "-"; }
    std::ostream& stream() { return to_file() ? static_cast<std::ostream&>(file_) : fallback_; }

    void close() {
        stream().flush();
        if (to_file()) {
            file_.close();
            if (!file_) throw io_error("failed writing '" + path_ + "'");
        }
    }

private:
    std::string path_;
    std::ostream& fallback_;
    std::ofstream file_;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* flag) {
    std::vector<int> out;
    for (const auto& item : split_list(s)) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw domain_error(fmt::format("{}: '{}' is not an integer", flag, item));
        }
    }
    if (out.empty()) throw domain_error(fmt::format("{}: empty list", flag));
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const char* flag) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw domain_error(fmt::format("{}: '{}' is not a number", flag, item));
        }
    }
    if (out.empty()) throw domain_error(fmt::format("{}: empty list", flag));
    return out;
}

void write_comment_header(std::ostream& os, const Invocation& inv) {
    os << "# invocation: " << inv.command_line() << '\n';
}

// ---------------------------------------------------------------- levels

struct LevelsOptions {
    double lambda = 0.0;
    bool lambda_given = false;
    int n_max = 5;
    double h = 1.0;
    double alpha = 1.0;
    double delta = 0.0;
    std::string method = "cubic";
    std::size_t grid_points = 4097;
    double half_width = 0.0;  // 0: default_numeric_grid(lambda)
    std::string out = "-";
};

int cmd_levels(const LevelsOptions& o, std::ostream& stdout_) {
    const ModelParams params(o.h, o.alpha, o.delta);
    double lambda = params.lambda();
    if (o.lambda_given) {
        if (o.delta != 0.0 && std::abs(o.lambda - lambda) > 1e-12 * std::max(1.0, std::abs(lambda)))
            throw domain_error(fmt::format("--lambda {} disagrees with --delta (implies {})",
                                           num(o.lambda), num(lambda)));
        lambda = o.lambda;
    }
    if (o.n_max < 0) throw domain_error("--n-max must be non-negative");

    const double half_width =
        o.half_width > 0.0 ? o.half_width : default_numeric_grid(lambda).half_width;

    Invocation inv("levels");
    inv.add("--lambda", lambda);
    inv.add("--n-max", static_cast<long long>(o.n_max));
    inv.add("--h", o.h);
    inv.add("--alpha", o.alpha);
    inv.add("--delta", o.delta);
    inv.add("--method", o.method);
    if (o.method == "numeric") {
        inv.add("--grid-points", static_cast<unsigned long long>(o.grid_points));
        inv.add("--half-width", half_width);
    }

    // cubic levels, one per n; nullopt on branch breakdown
    std::vector<std::optional<double>> cubic;
    for (int n = 0; n <= o.n_max; ++n) {
        try {
            cubic.push_back((2.0 * n + 1.0) * anharmonic_ratio(n, lambda));
        } catch (const level_breakdown_error&) {
            cubic.push_back(std::nullopt);
        }
    }

    Output out(o.out, stdout_);
    auto& os = out.stream();
    write_comment_header(os, inv);
    os << "# lambda: " << num(lambda) << '\n';
    os << "# energy_scale: " << num(params.energy_scale()) << '\n';

    if (o.method == "cubic") {
        os << "n,omega,e_bar,status\n";
        for (int n = 0; n <= o.n_max; ++n) {
            if (cubic[n]) {
                const auto level = make_level(n, *cubic[n], params);
                os << n << ',' << num(level.omega) << ',' << num(level.e_bar) << ",ok\n";
            } else {
                os << n << ",nan,nan,breakdown\n";
            }
        }
    } else {
        const auto spectrum =
            numeric_spectrum(lambda, o.n_max, NumericGrid{half_width, o.grid_points});
        os << "# refinement_shift: " << num(spectrum.refinement_shift) << '\n';
        os << "n,omega,e_bar,cubic_omega,rel_deviation,status\n";
        for (int n = 0; n <= o.n_max; ++n) {
            const auto& level = spectrum.levels[n];
            const auto e = make_level(n, level.omega, params);
            os << n << ',' << num(e.omega) << ',' << num(e.e_bar) << ',';
            if (cubic[n])
                os << num(*cubic[n]) << ',' << num((*cubic[n] - level.omega) / level.omega);
            else
                os << "nan,nan";
            os << ',' << (level.physical ? "ok" : "nonphysical") << '\n';
        }
    }
    out.close();
    return kExitOk;
}

// ---------------------------------------------------------------- density

struct DensityOptions {
    int n = 0;
    bool n_given = false;
    std::string levels;
    std::string weights;
    double h = 1.0;
    double alpha = 1.0;
    double delta = 0.0;
    std::size_t grid_points = 4097;
    double half_width = 0.0;  // 0: 12 sigma
    double prominence = 0.01;
    std::string out = "-";
};

int cmd_density(const DensityOptions& o, std::ostream& stdout_) {
    const ModelParams params(o.h, o.alpha, o.delta);
    std::vector<int> levels;
    std::vector<double> weights;
    if (o.n_given) {
        if (!o.levels.empty() || !o.weights.empty())
            throw domain_error("--n cannot be combined with --levels/--weights");
        levels = {o.n};
        weights = {1.0};
    } else {
        if (o.levels.empty() || o.weights.empty())
            throw domain_error("give either --n or both --levels and --weights");
        levels = parse_int_list(o.levels, "--levels");
        weights = parse_double_list(o.weights, "--weights");
        if (levels.size() != weights.size())
            throw domain_error("--levels and --weights need the same length");
    }
    if (!(o.prominence >= 0.0)) throw domain_error("--prominence must be non-negative");

    Invocation inv("density");
    if (o.n_given) {
        inv.add("--n", static_cast<long long>(o.n));
    } else {
        inv.add("--levels", o.levels);
        inv.add("--weights", o.weights);
    }
    inv.add("--h", o.h);
    inv.add("--alpha", o.alpha);
    inv.add("--delta", o.delta);
    inv.add("--grid", static_cast<unsigned long long>(o.grid_points));
    inv.add("--half-width", o.half_width);
    inv.add("--prominence", o.prominence);

    std::vector<DensityGrid> parts;
    if (o.delta == 0.0) {
        const UniformGrid grid = UniformGrid::symmetric(
            o.half_width > 0.0 ? o.half_width : 12.0 * params.sigma(), o.grid_points);
        for (int n : levels) parts.push_back(harmonic_density(n, params, grid));
    } else {
        // finite-difference eigenstates on the xi grid that maps to the
        // requested r half-width
        const double xi_half = o.half_width > 0.0 ? o.half_width * params.xi_per_r()
                                                  : default_numeric_grid(params.lambda()).half_width;
        const int top = *std::max_element(levels.begin(), levels.end());
        if (*std::min_element(levels.begin(), levels.end()) < 0)
            throw domain_error("levels must be non-negative");
        const auto spectrum = numeric_spectrum(params.lambda(), top, {xi_half, o.grid_points});
        for (int n : levels) {
            if (!spectrum.levels[n].physical)
                throw domain_error(fmt::format("level {} is not bound for lambda = {}", n,
                                               num(params.lambda())));
            parts.push_back(density_from_state(spectrum.xi, spectrum.levels[n].state, params));
        }
    }
    const DensityGrid density = mixture_density(weights, parts);
    const int modes = count_modes(density, o.prominence);
    const auto cdf = cumulative_trapezoid(density.values, density.grid.spacing());

    Output out(o.out, stdout_);
    auto& os = out.stream();
    write_comment_header(os, inv);
    os << "# modes: " << modes << '\n';
    os << "# integral: " << num(cdf.back()) << '\n';
    os << "r,density,cdf\n";
    const auto r = density.grid.nodes();
    for (std::size_t i = 0; i < r.size(); ++i)
        os << num(r[i]) << ',' << num(density.values[i]) << ',' << num(cdf[i]) << '\n';
    out.close();
    if (out.to_file()) stdout_ << "modes=" << modes << " integral=" << num(cdf.back()) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- detect

struct DetectOptions {
    std::string input;
    int boot = 100;
    double alpha_sig = 0.05;
    double step = 0.05;
    double start = 0.05;
    std::size_t min_subset = 22;
    std::size_t min_days = kDefaultMinDays;
    unsigned long long seed = 0;
    unsigned threads = 1;
    std::string out = "-";
};

ordered_json detection_json(const DetectionResult& r, const DetectionConfig& cfg,
                            const Invocation& inv, const std::string& input, std::size_t records) {
    ordered_json j;
    j["command"] = "detect";
    j["invocation"] = inv.json();
    j["config"] = {{"start_fraction", cfg.start_fraction},
                   {"step_fraction", cfg.step_fraction},
                   {"n_boot", cfg.n_boot},
                   {"alpha_sig", cfg.alpha_sig},
                   {"min_subset_days", cfg.min_subset_days},
                   {"seed", cfg.seed}};
    j["input"] = {{"path", input}, {"records", records}};
    j["v_min"] = r.v_min;
    j["v_max"] = r.v_max;
    j["e0"] = r.e0 ? ordered_json(*r.e0) : ordered_json(nullptr);
    j["eta"] = r.eta ? ordered_json(*r.eta) : ordered_json(">1");
    auto trace = ordered_json::array();
    for (const auto& s : r.trace)
        trace.push_back({{"threshold", s.threshold},
                         {"subset_size", s.subset_size},
                         {"dip", s.dip},
                         {"p_value", s.p_value}});
    j["trace"] = std::move(trace);
    return j;
}

int cmd_detect(const DetectOptions& o, std::ostream& stdout_) {
    const auto bars = load_bars_file(o.input);
    const auto records = compute_returns(bars);
    if (!eligible(records, o.min_days))
        throw domain_error(fmt::format("ineligible series: {} records, need at least {}",
                                       records.size(), o.min_days));

    DetectionConfig cfg;
    cfg.start_fraction = o.start;
    cfg.step_fraction = o.step;
    cfg.n_boot = o.boot;
    cfg.alpha_sig = o.alpha_sig;
    cfg.min_subset_days = o.min_subset;
    cfg.seed = o.seed;
    cfg.threads = std::max(1u, o.threads);
    const auto result = detect_ground_level(records, cfg);

    Invocation inv("detect");
    inv.add("--input", o.input);
    inv.add("--boot", static_cast<long long>(o.boot));
    inv.add("--alpha-sig", o.alpha_sig);
    inv.add("--step", o.step);
    inv.add("--start", o.start);
    inv.add("--min-subset", static_cast<unsigned long long>(o.min_subset));
    inv.add("--min-days", static_cast<unsigned long long>(o.min_days));
    inv.add("--seed", o.seed);

    Output out(o.out, stdout_);
    out.stream() << detection_json(result, cfg, inv, o.input, records.size()).dump(2) << '\n';
    out.close();
    if (out.to_file()) {
        stdout_ << "e0=" << (result.e0 ? num(*result.e0) : std::string("none"))
                << " eta=" << (result.eta ? num(*result.eta) : std::string(">1")) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
    int low = 0;
    int high = 1;
    double threshold_pct = 60.0;
    std::size_t days = 2000;
    unsigned long long seed = 0;
    double h = 1.0;
    double alpha = 1.0;
    double delta = 0.0;
    double volume_log_mean = VolumeModel{}.log_mean;
    double volume_log_sd = VolumeModel{}.log_sd;
    std::string out = "-";
};

int cmd_synth(const SynthOptions& o, std::ostream& stdout_) {
    const ModelParams params(o.h, o.alpha, o.delta);
    const auto records = synthesize_market(params, o.low, o.high, o.threshold_pct, o.days, o.seed,
                                           {o.volume_log_mean, o.volume_log_sd});
    const auto bars = bars_from_returns(records);

    Invocation inv("synth");
    inv.add("--low", static_cast<long long>(o.low));
    inv.add("--high", static_cast<long long>(o.high));
    inv.add("--threshold-pct", o.threshold_pct);
    inv.add("--days", static_cast<unsigned long long>(o.days));
    inv.add("--seed", o.seed);
    inv.add("--h", o.h);
    inv.add("--alpha", o.alpha);
    inv.add("--delta", o.delta);
    inv.add("--volume-log-mean", o.volume_log_mean);
    inv.add("--volume-log-sd", o.volume_log_sd);

    Output out(o.out, stdout_);
    write_bars(out.stream(), bars);
    out.close();

    if (out.to_file()) {
        // the bars header must stay on line 1, so parameters go to a sidecar
        ordered_json meta;
        meta["command"] = "synth";
        meta["invocation"] = inv.json();
        meta["planted_threshold"] = records.empty() ? ordered_json(nullptr)
                                                    : ordered_json(volume_percentile(records, o.threshold_pct));
        Output side(o.out + ".meta.json", stdout_);
        side.stream() << meta.dump(2) << '\n';
        side.close();
    }
    return kExitOk;
}

// ---------------------------------------------------------------- dip

struct DipOptions {
    std::string input;
    int boot = 100;
    unsigned long long seed = 0;
    unsigned threads = 1;
};

std::vector<double> read_column(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const std::string field = line.substr(first);
        if (field.find(',') != std::string::npos)
            throw parse_error(line_no, fmt::format("line {}: expected a single column", line_no));
        std::size_t used = 0;
        double v = 0.0;
        bool ok = true;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok || used != field.size() || !std::isfinite(v)) {
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw parse_error(line_no, fmt::format("line {}: '{}' is not a number", line_no, field));
        }
        header_allowed = false;
        values.push_back(v);
    }
    return values;
}

int cmd_dip(const DipOptions& o, std::ostream& stdout_) {
    const auto values = read_column(o.input);
    if (values.size() < kMinModalitySample)
        throw domain_error(fmt::format("need at least 4 values, got {}", values.size()));
    const auto v = modality_pvalue(Sample(values), o.boot, o.seed, std::max(1u, o.threads));
    stdout_ << "dip=" << num(v.statistic) << " p_value=" << num(v.p_value) << " n=" << values.size()
            << " n_boot=" << v.n_boot << " seed=" << v.seed << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- driver

void report(std::ostream& err, const char* kind, const std::string& message, int code) {
    ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    j["exit"] = code;
    err << j.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum-probability return model: trading levels, densities and "
                 "ground-level detection"};
    app.name("qpr");
    app.require_subcommand(1);
    // "--h" is a model parameter, so help is long-form only
    app.set_help_flag("--help", "Print this help message and exit");

    std::function<int()> action;

    LevelsOptions lv;
    auto* levels = app.add_subcommand("levels", "Trading energy levels (cubic or finite-difference)");
    auto* lambda_opt = levels->add_option("--lambda", lv.lambda, "Quartic coupling (default: from --delta)");
    levels->add_option("--n-max", lv.n_max, "Highest level index")->capture_default_str();
    levels->add_option("--h", lv.h, "Volume per trading decision")->capture_default_str();
    levels->add_option("--alpha", lv.alpha, "Quadratic SDG coefficient")->capture_default_str();
    levels->add_option("--delta", lv.delta, "Quartic SDG coefficient")->capture_default_str();
    levels->add_option("--method", lv.method)->check(CLI::IsMember({"cubic", "numeric"}))->capture_default_str();
    levels->add_option("--grid-points", lv.grid_points, "Numeric xi grid size")->capture_default_str();
    levels->add_option("--half-width", lv.half_width,
                       "Numeric xi half width (default 12, cut to sqrt(-1/lambda) for lambda < 0)");
    levels->add_option("--out", lv.out, "Output CSV ('-' = stdout)")->capture_default_str();
    levels->callback([&] {
        lv.lambda_given = lambda_opt->count() > 0;
        action = [&] { return cmd_levels(lv, out); };
    });

    DensityOptions dn;
    auto* density = app.add_subcommand("density", "Return density of a level or a mixture of levels");
    auto* n_opt = density->add_option("--n", dn.n, "Single level index");
    density->add_option("--levels", dn.levels, "Comma-separated level indices");
    density->add_option("--weights", dn.weights, "Comma-separated mixture weights");
    density->add_option("--h", dn.h)->capture_default_str();
    density->add_option("--alpha", dn.alpha)->capture_default_str();
    density->add_option("--delta", dn.delta)->capture_default_str();
    density->add_option("--grid", dn.grid_points, "Number of r grid points")->capture_default_str();
    density->add_option("--half-width", dn.half_width, "r grid half width (default 12 sigma)");
    density->add_option("--prominence", dn.prominence, "Mode-count prominence")->capture_default_str();
    density->add_option("--out", dn.out, "Output CSV ('-' = stdout)")->capture_default_str();
    density->callback([&] {
        dn.n_given = n_opt->count() > 0;
        action = [&] { return cmd_density(dn, out); };
    });

    DetectOptions dt;
    auto* detect = app.add_subcommand("detect", "Ground-level volume threshold from a bars CSV");
    detect->add_option("--input", dt.input, "Bars CSV (date,open,high,low,close,volume)")->required();
    detect->add_option("--boot", dt.boot, "Bootstrap replicates per test")->capture_default_str();
    detect->add_option("--alpha-sig", dt.alpha_sig, "Significance level")->capture_default_str();
    detect->add_option("--step", dt.step, "Threshold step, fraction of volume range")->capture_default_str();
    detect->add_option("--start", dt.start, "First threshold, fraction of volume range")->capture_default_str();
    detect->add_option("--min-subset", dt.min_subset, "Smallest tested subset")->capture_default_str();
    detect->add_option("--min-days", dt.min_days, "Eligibility: minimum records")->capture_default_str();
    detect->add_option("--seed", dt.seed)->capture_default_str();
    detect->add_option("--threads", dt.threads, "Bootstrap worker threads")->capture_default_str();
    detect->add_option("--out", dt.out, "Result JSON ('-' = stdout)")->capture_default_str();
    detect->callback([&] { action = [&] { return cmd_detect(dt, out); }; });

    SynthOptions sy;
    auto* synth = app.add_subcommand("synth", "Synthetic bars with a planted level switch");
    synth->add_option("--low", sy.low, "Level below the threshold")->capture_default_str();
    synth->add_option("--high", sy.high, "Level at or above the threshold")->capture_default_str();
    synth->add_option("--threshold-pct", sy.threshold_pct, "Volume percentile of the switch")->capture_default_str();
    synth->add_option("--days", sy.days)->capture_default_str();
    synth->add_option("--seed", sy.seed)->capture_default_str();
    synth->add_option("--h", sy.h)->capture_default_str();
    synth->add_option("--alpha", sy.alpha)->capture_default_str();
    synth->add_option("--delta", sy.delta)->capture_default_str();
    synth->add_option("--volume-log-mean", sy.volume_log_mean)->capture_default_str();
    synth->add_option("--volume-log-sd", sy.volume_log_sd)->capture_default_str();
    synth->add_option("--out", sy.out, "Output CSV ('-' = stdout)")->capture_default_str();
    synth->callback([&] { action = [&] { return cmd_synth(sy, out); }; });

    DipOptions dp;
    auto* dip = app.add_subcommand("dip", "Dip statistic and bootstrap p-value of one column");
    dip->add_option("--input", dp.input, "One numeric column, optional header")->required();
    dip->add_option("--boot", dp.boot)->capture_default_str();
    dip->add_option("--seed", dp.seed)->capture_default_str();
    dip->add_option("--threads", dp.threads)->capture_default_str();
    dip->callback([&] { action = [&] { return cmd_dip(dp, out); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report(err, "usage", e.what(), kExitDomain);
        return kExitDomain;
    }

    try {
        return action();
    } catch (const parse_error& e) {
        report(err, "parse", e.what(), kExitIo);
        return kExitIo;
    } catch (const io_error& e) {
        report(err, "io", e.what(), kExitIo);
        return kExitIo;
    } catch (const validation_error& e) {
        report(err, "validation", e.what(), kExitDomain);
        return kExitDomain;
    } catch (const level_breakdown_error& e) {
        report(err, "breakdown", e.what(), kExitDomain);
        return kExitDomain;
    } catch (const domain_error& e) {
        report(err, "domain", e.what(), kExitDomain);
        return kExitDomain;
    } catch (const truncation_error& e) {
        report(err, "truncation", e.what(), kExitDomain);
        return kExitDomain;
    } catch (const resolution_error& e) {
        report(err, "resolution", e.what(), kExitDomain);
        return kExitDomain;
    }
}

}  // namespace qpr
