#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "effortnn/report.hpp"
#include "effortnn/svg.hpp"

namespace fs = std::filesystem;
using namespace effortnn;
using nlohmann::json;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "effortnn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("effortnn_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

const std::string kData = EFFORTNN_TEST_DATA;
const std::string kSynthetic = std::string(EFFORTNN_SOURCE_DIR) + "/config/synthetic_default.json";

}  // namespace

TEST_CASE("filter on the fixture writes band files and a manifest") {
    const auto dir = scratch("filter");
    const auto r = run({"filter", "--input", kData + "/fixture40.csv", "--mapping", kData + "/fixture40_mapping.toml",
                        "--out", dir.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto manifest = json::parse(slurp(dir / "manifest.json"));
    std::vector<std::size_t> trace;
    for (const auto& s : manifest["trace"]) trace.push_back(s["count"]);
    CHECK(trace == std::vector<std::size_t>{35, 30, 30, 25, 20});
    REQUIRE(manifest["datasets"].size() == 5);
    const std::vector<std::pair<int, int>> expected{{4, 2}, {4, 1}, {2, 1}, {1, 1}, {3, 1}};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(manifest["datasets"][i]["train"] == expected[i].first);
        CHECK(manifest["datasets"][i]["test"] == expected[i].second);
        CHECK(fs::exists(dir / ("Dataset" + std::to_string(i + 1) + ".csv")));
    }
    CHECK(r.out.find("development_type") != std::string::npos);
}

TEST_CASE("configuration errors exit with code 2") {
    const auto missing = run({"filter", "--input", kData + "/fixture40.csv", "--mapping", "/nope/map.toml"});
    CHECK(missing.code == cli::kExitConfig);
    CHECK(missing.err.find("/nope/map.toml") != std::string::npos);

    const auto dir = scratch("plotkind");
    const auto kind = run({"plot", "--kind", "histogram", "--synthetic-spec", kSynthetic, "--out", dir.string()});
    CHECK(kind.code == cli::kExitConfig);
    CHECK(kind.err.find("histogram") != std::string::npos);

    CHECK(run({"bench", "--input", "a.csv", "--synthetic-spec", kSynthetic}).code == cli::kExitConfig);
    CHECK(run({"frobnicate"}).code != 0);
}

TEST_CASE("scatter plot has one mark per project") {
    std::vector<ProjectRecord> rs(3);
    for (int i = 0; i < 3; ++i) {
        rs[static_cast<std::size_t>(i)].project_id = "P" + std::to_string(i);
        rs[static_cast<std::size_t>(i)].afp = 100.0 * (i + 1);
        rs[static_cast<std::size_t>(i)].normalised_effort = 500.0 * (i + 1);
    }
    const auto svg = scatter_svg("three", rs);
    CHECK(count_of(svg, "class=\"point\"") == 3);
    CHECK(scatter_svg("three", rs) == svg);
}

TEST_CASE("interval whiskers use 1.96 sample sd over root n") {
    const std::vector<double> r{1, 2, 3, 4, 10};
    const auto g = interval_of("M", r);
    double mean = 0;
    for (double v : r) mean += v;
    mean /= 5;
    double ss = 0;
    for (double v : r) ss += (v - mean) * (v - mean);
    CHECK(g.mean == doctest::Approx(mean));
    CHECK(std::abs(g.half_width - 1.96 * std::sqrt(ss / 4) / std::sqrt(5.0)) <= 1e-9);
    CHECK(interval_of("M", std::vector<double>{7}).half_width == 0.0);

    const std::vector<IntervalGroup> four{interval_of("MLP", r), interval_of("GRNN", r), interval_of("RBFNN", r),
                                          interval_of("CCNN", r)};
    const auto svg = interval_svg("t", four);
    CHECK(count_of(svg, "class=\"whisker\"") == 4);
    CHECK(svg.find("1.96") != std::string::npos);
}

TEST_CASE("bench is reproducible and honours the output directory variable") {
    const auto dir = scratch("bench_env");
    ::setenv("EFFORTNN_OUTPUT_DIR", (dir / "first").c_str(), 1);
    const auto a = run({"bench", "--synthetic-spec", kSynthetic, "--baseline", "--plots", "--importance-repeats", "3"});
    ::unsetenv("EFFORTNN_OUTPUT_DIR");
    REQUIRE_MESSAGE(a.code == 0, a.err);
    const auto b = run({"bench", "--synthetic-spec", kSynthetic, "--baseline", "--importance-repeats", "3", "--out",
                        (dir / "second").string()});
    REQUIRE_MESSAGE(b.code == 0, b.err);
    const auto ja = json::parse(slurp(dir / "first" / "report.json"));
    const auto jb = json::parse(slurp(dir / "second" / "report.json"));
    CHECK(without_timing(ja) == without_timing(jb));

    const auto md = slurp(dir / "first" / "report.md");
    CHECK(md.find("Baseline") != std::string::npos);
    CHECK(md.find("CCNN vs MLP") != std::string::npos);
    CHECK(fs::exists(dir / "first" / "plots" / "Dataset1_mar_interval.svg"));
    // Four networks plus the baseline.
    CHECK(count_of(slurp(dir / "first" / "plots" / "Dataset1_mar_interval.svg"), "class=\"whisker\"") == 5);

    const auto rep = run({"report", "--report", (dir / "first" / "report.json").string()});
    CHECK(rep.code == 0);
    CHECK(rep.out == md);

    const auto single = run({"bench", "--synthetic-spec", kSynthetic, "--models", "GRNN", "--importance-repeats", "2",
                             "--out", (dir / "single").string()});
    REQUIRE(single.code == 0);
    CHECK(slurp(dir / "single" / "report.md").find("CCNN vs MLP") == std::string::npos);
}

TEST_CASE("bench reads a filter output directory") {
    const auto dir = scratch("bench_dir");
    REQUIRE(run({"synth", "--synthetic-spec", kSynthetic, "--out", (dir / "raw").string()}).code == 0);
    // Canonical headers need no mapping file.
    REQUIRE(run({"filter", "--input", (dir / "raw" / "synthetic.csv").string(), "--out", (dir / "data").string()})
                .code == 0);
    const auto r = run({"bench", "--input", (dir / "data").string(), "--models", "GRNN,MLP", "--importance-repeats", "2",
                        "--out", (dir / "bench").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto report = json::parse(slurp(dir / "bench" / "report.json"));
    CHECK(report["datasets"].size() == 5);
}
