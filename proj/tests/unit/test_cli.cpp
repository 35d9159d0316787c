#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpr/cli.hpp"
#include "qpr/pipeline.hpp"

using namespace qpr;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path workdir() {
    const fs::path dir = fs::path(QPR_TEST_WORKDIR);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

// Data rows of a CSV body: lines that are neither comments nor the header.
std::vector<std::vector<std::string>> rows(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        out.push_back(f);
    }
    return out;
}

std::string comment(const std::string& text, const std::string& key) {
    const auto pos = text.find("# " + key + ": ");
    if (pos == std::string::npos) return {};
    const auto start = pos + key.size() + 4;
    return text.substr(start, text.find('\n', start) - start);
}

void check_error_line(const Run& r, int code) {
    CHECK(r.code == code);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    const auto j = nlohmann::json::parse(r.err);
    CHECK(j["exit"] == code);
    CHECK(j.contains("message"));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("levels, cubic") {
    auto r = run({"levels", "--lambda", "0", "--n-max", "3", "--method", "cubic"});
    REQUIRE(r.code == 0);
    auto t = rows(r.out);
    REQUIRE(t.size() == 4);
    for (int n = 0; n <= 3; ++n) {
        CHECK(std::stod(t[n][1]) == 2 * n + 1);
        CHECK(t[n][3] == "ok");
    }
    CHECK(r.out.find("# invocation: qpr levels --lambda 0 --n-max 3") != std::string::npos);

    r = run({"levels", "--lambda", "0.05", "--n-max", "2"});
    t = rows(r.out);
    const double g1 = std::stod(t[1][1]) - std::stod(t[0][1]);
    const double g2 = std::stod(t[2][1]) - std::stod(t[1][1]);
    CHECK(g1 > 2.0);
    CHECK(g2 > g1);

    r = run({"levels", "--lambda", "-0.1", "--n-max", "4"});
    REQUIRE(r.code == 0);
    t = rows(r.out);
    CHECK(t[2][3] == "ok");
    CHECK(t[3][3] == "breakdown");
    CHECK(t[3][1] == "nan");
}

TEST_CASE("levels, numeric") {
    auto r = run({"levels", "--lambda", "0", "--n-max", "5", "--method", "numeric"});
    REQUIRE(r.code == 0);
    const auto t = rows(r.out);
    REQUIRE(t.size() == 6);
    for (int n = 0; n <= 5; ++n) {
        CHECK(std::abs(std::stod(t[n][1]) - (2 * n + 1)) <= 1e-3);
        CHECK(std::abs(std::stod(t[n][4])) <= 1e-3);
    }
    r = run({"levels", "--lambda", "-0.05", "--n-max", "3", "--method", "numeric"});
    REQUIRE(r.code == 0);
    CHECK(rows(r.out)[3][5] == "nonphysical");
    CHECK(rows(r.out)[0][5] == "ok");
}

TEST_CASE("levels, parameter consistency") {
    CHECK(run({"levels", "--delta", "0.2", "--h", "1", "--alpha", "1"}).out.find("# lambda: 0.10000000000000001") !=
          std::string::npos);
    check_error_line(run({"levels", "--lambda", "0.3", "--delta", "0.2"}), kExitDomain);
    check_error_line(run({"levels", "--h", "-1"}), kExitDomain);
    check_error_line(run({"levels", "--method", "spline"}), kExitDomain);
    check_error_line(run({"levels", "--method", "numeric", "--grid-points", "41"}), kExitDomain);
}

TEST_CASE("density") {
    auto r = run({"density", "--n", "0", "--h", "4", "--alpha", "1"});
    REQUIRE(r.code == 0);
    auto t = rows(r.out);
    REQUIRE(t.size() == 4097);
    CHECK(std::stod(t[2048][0]) == 0.0);
    CHECK(std::stod(t[2048][1]) == doctest::Approx(0.398942).epsilon(1e-6));
    CHECK(comment(r.out, "modes") == "1");

    r = run({"density", "--n", "3"});
    CHECK(comment(r.out, "modes") == "4");

    r = run({"density", "--levels", "0,1", "--weights", "0.5,0.5"});
    REQUIRE(r.code == 0);
    CHECK(std::abs(std::stod(comment(r.out, "integral")) - 1.0) <= 1e-6);
    CHECK(std::abs(std::stod(rows(r.out).back()[2]) - 1.0) <= 1e-6);

    const auto out = workdir() / "density.csv";
    r = run({"density", "--n", "2", "--delta", "0.1", "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("modes=3 ", 0) == 0);
    CHECK(slurp(out).rfind("# invocation: qpr density --n 2", 0) == 0);

    check_error_line(run({"density"}), kExitDomain);
    check_error_line(run({"density", "--n", "1", "--levels", "0"}), kExitDomain);
    check_error_line(run({"density", "--levels", "0,1", "--weights", "1"}), kExitDomain);
    check_error_line(run({"density", "--levels", "0,x", "--weights", "0.5,0.5"}), kExitDomain);
    check_error_line(run({"density", "--levels", "0,1", "--weights", "0.6,0.6"}), kExitDomain);
    check_error_line(run({"density", "--n", "31"}), kExitDomain);
    check_error_line(run({"density", "--n", "0", "--out", "/nonexistent/dir/x.csv"}), kExitIo);
}

TEST_CASE("synth") {
    const auto dir = workdir();
    auto r = run({"synth", "--days", "0", "--out", (dir / "empty.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "empty.csv") == std::string(kBarsHeader) + "\n");

    r = run({"synth", "--seed", "5", "--out", (dir / "bars.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(load_bars_file((dir / "bars.csv").string()).size() == 2000);
    const auto meta = nlohmann::json::parse(slurp(dir / "bars.csv.meta.json"));
    CHECK(meta["invocation"]["--seed"] == "5");
    CHECK(meta["invocation"]["--days"] == "2000");

    r = run({"synth", "--days", "3"});
    CHECK(r.out.rfind(std::string(kBarsHeader), 0) == 0);

    check_error_line(run({"synth", "--low", "-1"}), kExitDomain);
    check_error_line(run({"synth", "--high", "40"}), kExitDomain);
}

TEST_CASE("detect") {
    const auto dir = workdir();
    REQUIRE(run({"synth", "--seed", "0", "--out", (dir / "planted.csv").string()}).code == 0);
    REQUIRE(run({"synth", "--seed", "0", "--high", "0", "--out", (dir / "null.csv").string()}).code == 0);

    auto r = run({"detect", "--input", (dir / "planted.csv").string(), "--out", (dir / "planted.json").string()});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(slurp(dir / "planted.json"));
    REQUIRE(j["e0"].is_number());
    const auto recs = compute_returns(load_bars_file((dir / "planted.csv").string()));
    const double plant = volume_percentile(recs, 60.0);
    const double step = 0.05 * (j["v_max"].get<double>() - j["v_min"].get<double>());
    CHECK(std::abs(j["e0"].get<double>() - plant) <= step);
    CHECK(j["eta"].get<double>() == doctest::Approx(j["e0"].get<double>() / j["v_max"].get<double>()));
    CHECK(j["config"]["seed"] == 0);
    CHECK(j["trace"].size() >= 1);
    CHECK(r.out.rfind("e0=", 0) == 0);

    r = run({"detect", "--input", (dir / "null.csv").string()});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["eta"] == ">1");
    CHECK(j["e0"].is_null());

    // determinism across runs and thread counts
    const auto a = run({"detect", "--input", (dir / "planted.csv").string(), "--seed", "3"});
    const auto b = run({"detect", "--input", (dir / "planted.csv").string(), "--seed", "3", "--threads", "4"});
    CHECK(a.out == b.out);

    // errors: parse failure, missing file, ineligible series
    spit(dir / "broken.csv", "date,open,high,low,close,volume\n2020-01-01,1,1,1\n");
    check_error_line(run({"detect", "--input", (dir / "broken.csv").string()}), kExitIo);
    check_error_line(run({"detect", "--input", (dir / "nope.csv").string()}), kExitIo);
    REQUIRE(run({"synth", "--days", "500", "--out", (dir / "short.csv").string()}).code == 0);
    check_error_line(run({"detect", "--input", (dir / "short.csv").string()}), kExitDomain);
    CHECK(run({"detect", "--input", (dir / "short.csv").string(), "--min-days", "500"}).code == 0);
    check_error_line(run({"detect"}), kExitDomain);
    check_error_line(run({"detect", "--input", (dir / "planted.csv").string(), "--boot", "0"}), kExitDomain);
}

TEST_CASE("dip") {
    const auto dir = workdir();
    spit(dir / "ap.txt", "return\n0\n1\n2\n3\n");
    auto r = run({"dip", "--input", (dir / "ap.txt").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("dip=0.125 ", 0) == 0);

    spit(dir / "same.txt", "# constant\n2\n2\n2\n2\n2\n");
    r = run({"dip", "--input", (dir / "same.txt").string(), "--seed", "9"});
    CHECK(r.out.find("dip=0.10000000000000001 p_value=1 n=5 n_boot=100 seed=9") != std::string::npos);

    spit(dir / "clusters.txt", "0\n0.01\n0.02\n1\n1.01\n1.02\n");
    r = run({"dip", "--input", (dir / "clusters.txt").string()});
    CHECK(std::stod(r.out.substr(4)) >= 0.2);

    spit(dir / "three.txt", "1\n2\n3\n");
    check_error_line(run({"dip", "--input", (dir / "three.txt").string()}), kExitDomain);
    spit(dir / "bad.txt", "x\n1\ny\n");
    check_error_line(run({"dip", "--input", (dir / "bad.txt").string()}), kExitIo);
    spit(dir / "wide.txt", "1,2\n3,4\n");
    check_error_line(run({"dip", "--input", (dir / "wide.txt").string()}), kExitIo);
}

TEST_CASE("usage") {
    check_error_line(run({}), kExitDomain);
    check_error_line(run({"frobnicate"}), kExitDomain);
    check_error_line(run({"levels", "--n-max", "two"}), kExitDomain);
    const auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("detect") != std::string::npos);
}

TEST_CASE("the executable writes byte-identical detection results") {
    const auto dir = workdir();
    REQUIRE(run({"synth", "--seed", "11", "--out", (dir / "exe.csv").string()}).code == 0);
    const std::string tool = QPR_TOOL_PATH;
    for (const char* name : {"exe_a.json", "exe_b.json"}) {
        const std::string cmd = "\"" + tool + "\" detect --input \"" + (dir / "exe.csv").string() +
                                "\" --seed 11 --out \"" + (dir / name).string() + "\" > /dev/null";
        REQUIRE(std::system(cmd.c_str()) == 0);
    }
    CHECK(slurp(dir / "exe_a.json") == slurp(dir / "exe_b.json"));
    CHECK_FALSE(slurp(dir / "exe_a.json").empty());
}

}
