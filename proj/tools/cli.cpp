#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "effortnn/config_file.hpp"
#include "effortnn/dataset.hpp"
#include "effortnn/error.hpp"
#include "effortnn/estimators.hpp"
#include "effortnn/experiment.hpp"
#include "effortnn/model_io.hpp"
#include "effortnn/report.hpp"
#include "effortnn/stats.hpp"
#include "effortnn/svg.hpp"
#include "effortnn/synthetic.hpp"
#include "effortnn/table_io.hpp"
#include "effortnn/version.hpp"

namespace effortnn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutputEnv = "EFFORTNN_OUTPUT_DIR";
constexpr const char* kDefaultOutput = "effortnn-out";

struct RunConfig {
    std::optional<std::string> input;
    std::optional<std::string> mapping;
    std::optional<std::string> synthetic_spec;
    std::vector<double> bands = kDefaultBandEdges;
    double split_fraction = 0.7;
    std::vector<std::string> models;
    std::uint64_t seed = 42;
    double alpha = 0.05;
    std::optional<std::string> out;
    bool plots = false;
    bool relative_metrics = false;
    bool baseline = false;
    unsigned threads = 0;
    int importance_repeats = 20;
    FilterSpec filter;
    json model_overrides = json::object();  // kind -> EstimatorConfig fields
    // bench/plot/report only
    std::optional<std::string> report;
    std::string plot_kind;
};

// Values set on the command line; the config file fills whatever is left.
struct Flags {
    std::string input, mapping, synthetic_spec, bands, models, out, config, report, plot_kind;
    double split_fraction = 0.7, alpha = 0.05;
    std::uint64_t seed = 42;
    unsigned threads = 0;
    int importance_repeats = 20;
    bool plots = false, relative_metrics = false, baseline = false;
};

std::vector<double> parse_edges(const std::string& text) {
    std::vector<double> edges;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto t = trim(part);
        if (t.empty()) continue;
        try {
            std::size_t used = 0;
            edges.push_back(std::stod(t, &used));
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw ConfigError("--bands: cannot read '" + t + "' as a number");
        }
    }
    if (edges.empty()) throw ConfigError("--bands: no edges given");
    return edges;
}

std::vector<std::string> parse_models(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto t = trim(part);
        if (t.empty()) continue;
        out.emplace_back(to_string(model_kind_from_string(t)));
    }
    if (out.empty()) throw ConfigError("--models: no model kinds given");
    return out;
}

template <class T>
void take(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: bad value for '") + key + "'");
    }
}

void apply_config_file(RunConfig& rc, const fs::path& path) {
    const json j = load_config_file(path);
    static const std::vector<std::string> known = {
        "input", "mapping", "synthetic_spec", "bands", "split_fraction", "models", "seed", "alpha", "out", "plots",
        "relative_metrics", "baseline", "threads", "importance_repeats", "filter", "model", "report"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError(path.string() + ": unknown key '" + key + "'");
        }
    }
    const auto base = path.parent_path();
    auto path_value = [&](const char* key, std::optional<std::string>& out) {
        if (!j.contains(key)) return;
        std::string v;
        take(j, key, v);
        const fs::path p(v);
        out = (p.is_relative() ? base / p : p).string();
    };
    path_value("input", rc.input);
    path_value("mapping", rc.mapping);
    path_value("synthetic_spec", rc.synthetic_spec);
    path_value("out", rc.out);
    path_value("report", rc.report);
    take(j, "bands", rc.bands);
    take(j, "split_fraction", rc.split_fraction);
    if (j.contains("models")) {
        std::vector<std::string> names;
        take(j, "models", names);
        rc.models.clear();
        for (const auto& n : names) rc.models.emplace_back(to_string(model_kind_from_string(n)));
    }
    take(j, "seed", rc.seed);
    take(j, "alpha", rc.alpha);
    take(j, "plots", rc.plots);
    take(j, "relative_metrics", rc.relative_metrics);
    take(j, "baseline", rc.baseline);
    take(j, "threads", rc.threads);
    take(j, "importance_repeats", rc.importance_repeats);
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        if (f.contains("accepted_quality")) {
            std::vector<std::string> q;
            take(f, "accepted_quality", q);
            rc.filter.accepted_quality = {q.begin(), q.end()};
        }
        take(f, "accepted_count_approach", rc.filter.accepted_count_approach);
        take(f, "accepted_development_type", rc.filter.accepted_development_type);
        take(f, "required_fields", rc.filter.required_fields);
    }
    if (j.contains("model")) {
        if (!j.at("model").is_object()) throw ConfigError(path.string() + ": [model] must be a table");
        for (const auto& [kind, fields] : j.at("model").items()) {
            rc.model_overrides[std::string(to_string(model_kind_from_string(kind)))] = fields;
        }
    }
}

fs::path output_dir(const RunConfig& rc) {
    if (rc.out) return *rc.out;
    if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
    return kDefaultOutput;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ColumnMap mapping_for(const RunConfig& rc) {
    if (!rc.mapping) return ColumnMap::canonical();
    if (!fs::exists(*rc.mapping)) throw ConfigError("column mapping file not found: " + *rc.mapping);
    return load_column_map(*rc.mapping);
}

SyntheticSpec load_spec(const std::string& path) {
    const json j = load_config_file(path);
    try {
        SyntheticSpec spec = j.get<SyntheticSpec>();
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json stats_json(const StatsSummary& s) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"count", s.count},       {"mean", s.mean},         {"stdev", s.stdev},       {"minimum", s.minimum},
            {"median", s.median},     {"maximum", s.maximum},   {"skewness", num(s.skewness)},
            {"kurtosis", num(s.kurtosis)}};
}

std::vector<double> efforts(std::span<const ProjectRecord> records) {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(r.normalised_effort.value_or(0.0));
    return v;
}

struct Pipeline {
    StepTrace trace;
    std::vector<Dataset> datasets;
    std::vector<Split> splits;
    std::string source_digest;
};

Pipeline pipeline_from_records(std::vector<ProjectRecord> records, const RunConfig& rc, std::string digest) {
    rc.filter.validate();
    Pipeline p;
    p.source_digest = std::move(digest);
    auto filtered = filter_projects(records, rc.filter);
    p.trace = std::move(filtered.trace);
    p.datasets = band_by_productivity(filtered.records, rc.bands);
    for (const auto& d : p.datasets) {
        if (d.records.size() < 2) {
            Split s;
            s.name = d.name;
            s.fraction = rc.split_fraction;
            s.train = d.records;
            p.splits.push_back(std::move(s));
        } else {
            p.splits.push_back(chronological_split(d, rc.split_fraction));
        }
    }
    return p;
}

Pipeline pipeline_from_input_file(const RunConfig& rc) {
    const auto map = mapping_for(rc);
    const auto raw = read_file(*rc.input);
    return pipeline_from_records(parse_project_table(raw, map), rc, digest_hex(raw));
}

Pipeline pipeline_from_spec(const RunConfig& rc) {
    const auto spec = load_spec(*rc.synthetic_spec);
    auto records = generate_synthetic(spec);
    const auto digest = digest_hex(records_to_csv(records));
    return pipeline_from_records(std::move(records), rc, digest);
}

// Reads the DatasetN.csv files written by `filter`, keeping their split labels.
std::vector<Split> splits_from_directory(const fs::path& dir) {
    std::vector<std::pair<int, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("Dataset", 0) == 0 && entry.path().extension() == ".csv") {
            const auto digits = entry.path().stem().string().substr(7);
            int index = 0;
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
            index = std::stoi(digits);
            files.emplace_back(index, entry.path());
        }
    }
    if (files.empty()) throw ConfigError("no DatasetN.csv files in " + dir.string());
    std::sort(files.begin(), files.end());
    std::vector<Split> splits;
    for (const auto& [index, path] : files) {
        Split s;
        s.name = path.stem().string();
        for (auto& r : parse_project_table(read_file(path), ColumnMap::canonical())) {
            const auto it = r.extras.find("split");
            const std::string label = it == r.extras.end() ? "" : it->second;
            r.extras.erase("split");
            if (label == "train") s.train.push_back(std::move(r));
            else if (label == "test") s.test.push_back(std::move(r));
            else throw ConfigError(path.string() + ": record " + r.project_id + " has no train/test label");
        }
        const auto n = s.train.size() + s.test.size();
        s.fraction = n ? static_cast<double>(s.train.size()) / static_cast<double>(n) : 0.0;
        splits.push_back(std::move(s));
    }
    return splits;
}

void require_one_source(const RunConfig& rc) {
    if (rc.input.has_value() == rc.synthetic_spec.has_value()) {
        throw ConfigError("exactly one of --input and --synthetic-spec is required");
    }
}

void write_scatter_plots(const fs::path& dir, std::span<const Split> splits) {
    ensure_dir(dir);
    for (const auto& s : splits) {
        std::vector<ProjectRecord> all = s.train;
        all.insert(all.end(), s.test.begin(), s.test.end());
        write_file(dir / (s.name + "_scatter.svg"), scatter_svg(s.name, all));
    }
}

void write_interval_plots(const fs::path& dir, const BenchmarkReport& report) {
    ensure_dir(dir);
    for (const auto& d : report.datasets) {
        const auto groups = interval_groups(report, d.name);
        write_file(dir / (d.name + "_mar_interval.svg"), interval_svg("MAR interval plot - " + d.name, groups));
    }
}

int cmd_filter(const RunConfig& rc, std::ostream& out) {
    if (!rc.input) throw ConfigError("filter: --input is required");
    const auto p = pipeline_from_input_file(rc);
    const auto dir = output_dir(rc);
    ensure_dir(dir);

    json datasets = json::array();
    for (std::size_t i = 0; i < p.splits.size(); ++i) {
        const auto& s = p.splits[i];
        std::vector<ProjectRecord> rows = s.train;
        rows.insert(rows.end(), s.test.begin(), s.test.end());
        std::vector<std::string> labels(s.train.size(), "train");
        labels.resize(rows.size(), "test");
        write_file(dir / (s.name + ".csv"), records_to_csv(rows, labels));

        json train_ids = json::array(), test_ids = json::array();
        for (const auto& r : s.train) train_ids.push_back(r.project_id);
        for (const auto& r : s.test) test_ids.push_back(r.project_id);
        const auto& band = p.datasets[i].band;
        json entry = {{"name", s.name},
                      {"lower", band.lower},
                      {"upper", std::isfinite(band.upper) ? json(band.upper) : json(nullptr)},
                      {"count", rows.size()},
                      {"train", s.train.size()},
                      {"test", s.test.size()},
                      {"train_ids", train_ids},
                      {"test_ids", test_ids}};
        if (!rows.empty()) entry["effort_stats"] = stats_json(descriptive_stats(efforts(rows)));
        datasets.push_back(std::move(entry));
    }
    json trace = json::array();
    for (const auto& step : p.trace) trace.push_back({{"step", step.step}, {"count", step.count}});
    const json manifest = {{"input", *rc.input},
                           {"input_digest", p.source_digest},
                           {"mapping", rc.mapping ? json(*rc.mapping) : json(nullptr)},
                           {"band_edges", rc.bands},
                           {"split_fraction", rc.split_fraction},
                           {"trace", trace},
                           {"datasets", datasets},
                           {"library_version", std::string(kVersion)}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    if (rc.plots) write_scatter_plots(dir / "plots", p.splits);

    for (const auto& step : p.trace) out << step.step << ": " << step.count << '\n';
    for (std::size_t i = 0; i < p.splits.size(); ++i) {
        out << p.splits[i].name << ": " << p.datasets[i].records.size() << " (" << p.splits[i].train.size() << " train, "
            << p.splits[i].test.size() << " test)\n";
    }
    out << "wrote " << (dir / "manifest.json").string() << '\n';
    return kExitOk;
}

int cmd_synth(const RunConfig& rc, std::ostream& out) {
    SyntheticSpec spec;
    if (rc.synthetic_spec) spec = load_spec(*rc.synthetic_spec);
    else spec.seed = rc.seed;
    spec.validate();
    const auto records = generate_synthetic(spec);
    const auto dir = output_dir(rc);
    ensure_dir(dir);
    write_file(dir / "synthetic.csv", records_to_csv(records));
    write_file(dir / "synthetic_spec.json", json(spec).dump(2) + "\n");
    out << "wrote " << records.size() << " projects to " << (dir / "synthetic.csv").string() << '\n';
    return kExitOk;
}

std::vector<EstimatorConfig> model_configs(const RunConfig& rc) {
    std::vector<std::string> names = rc.models;
    if (names.empty()) {
        for (auto k : kAllModelKinds) names.emplace_back(to_string(k));
    }
    std::vector<EstimatorConfig> configs;
    for (const auto& n : names) {
        const auto kind = model_kind_from_string(n);
        EstimatorConfig c = EstimatorConfig::defaults(kind);
        const std::string key(to_string(kind));
        if (rc.model_overrides.contains(key)) {
            json fields = rc.model_overrides.at(key);
            if (fields.contains("kind")) throw ConfigError("[model." + key + "] must not set 'kind'");
            from_json(fields, c);
        }
        c.validate();
        configs.push_back(c);
    }
    return configs;
}

int cmd_bench(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    require_one_source(rc);
    std::vector<Split> splits;
    json source;
    if (rc.synthetic_spec) {
        splits = pipeline_from_spec(rc).splits;
        source = {{"synthetic_spec", *rc.synthetic_spec}};
    } else if (fs::is_directory(*rc.input)) {
        splits = splits_from_directory(*rc.input);
        source = {{"datasets_dir", *rc.input}};
    } else {
        if (!fs::exists(*rc.input)) throw ConfigError("input file not found: " + *rc.input);
        splits = pipeline_from_input_file(rc).splits;
        source = {{"input", *rc.input}, {"mapping", rc.mapping ? json(*rc.mapping) : json(nullptr)}};
    }
    const auto configs = model_configs(rc);
    BenchmarkOptions options;
    options.alpha = rc.alpha;
    options.relative_metrics = rc.relative_metrics;
    options.baseline = rc.baseline;
    options.threads = rc.threads;
    options.importance_repeats = rc.importance_repeats;

    auto report = run_benchmark(splits, configs, rc.seed, options);
    report.metadata["source"] = source;
    report.metadata["band_edges"] = rc.bands;
    report.metadata["split_fraction"] = rc.split_fraction;

    const auto dir = output_dir(rc);
    ensure_dir(dir);
    write_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
    write_file(dir / "report.md", render_markdown(report));
    if (rc.plots) {
        write_interval_plots(dir / "plots", report);
        write_scatter_plots(dir / "plots", splits);
    }

    std::size_t ok = 0;
    for (const auto& c : report.cells) {
        if (c.ok) ++ok;
        else err << "warning: " << c.dataset << "/" << c.model << " failed: " << c.error << '\n';
    }
    for (const auto& d : report.datasets) {
        out << d.name << ": best " << (d.winner ? *d.winner : std::string("none")) << '\n';
    }
    out << "wrote " << (dir / "report.json").string() << " and report.md\n";
    if (ok == 0) {
        err << "error: every benchmark cell failed\n";
        return kExitRuntime;
    }
    return kExitOk;
}

BenchmarkReport load_report(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("report file not found: " + path);
    try {
        return report_from_json(json::parse(read_file(path)));
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

int cmd_plot(const RunConfig& rc, std::ostream& out) {
    const auto dir = output_dir(rc);
    if (rc.plot_kind == "scatter") {
        std::vector<Split> splits;
        if (rc.input && fs::is_directory(*rc.input)) {
            splits = splits_from_directory(*rc.input);
        } else if (rc.input || rc.synthetic_spec) {
            require_one_source(rc);
            if (rc.input && !fs::exists(*rc.input)) throw ConfigError("input file not found: " + *rc.input);
            splits = (rc.input ? pipeline_from_input_file(rc) : pipeline_from_spec(rc)).splits;
        } else {
            throw ConfigError("plot --kind scatter needs --input or --synthetic-spec");
        }
        write_scatter_plots(dir, splits);
        out << "wrote " << splits.size() << " scatter plots to " << dir.string() << '\n';
    } else if (rc.plot_kind == "interval") {
        if (!rc.report) throw ConfigError("plot --kind interval needs --report");
        const auto report = load_report(*rc.report);
        write_interval_plots(dir, report);
        out << "wrote " << report.datasets.size() << " interval plots to " << dir.string() << '\n';
    } else {
        throw ConfigError("unknown plot kind '" + rc.plot_kind + "' (expected scatter or interval)");
    }
    return kExitOk;
}

int cmd_report(const RunConfig& rc, std::ostream& out) {
    if (!rc.report) throw ConfigError("report: --report is required");
    const auto markdown = render_markdown(load_report(*rc.report));
    if (rc.out) {
        ensure_dir(*rc.out);
        write_file(fs::path(*rc.out) / "report.md", markdown);
    } else {
        out << markdown;
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Neural-network software effort estimation benchmark", "effortnn"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Flags f;
    RunConfig rc;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "TOML or JSON file supplying defaults for any flag");
        sub->add_option("--out", f.out, std::string("Output directory (default: $") + kOutputEnv + " or " +
                                            kDefaultOutput + ")");
        sub->add_option("--seed", f.seed, "Random seed");
    };
    auto add_source = [&](CLI::App* sub) {
        sub->add_option("--input", f.input, "Project table, or a directory written by `filter`");
        sub->add_option("--mapping", f.mapping, "Column mapping file (TOML or JSON)");
        sub->add_option("--synthetic-spec", f.synthetic_spec, "Synthetic data spec (JSON or TOML)");
        sub->add_option("--bands", f.bands, "Comma-separated productivity band edges");
        sub->add_option("--split-fraction", f.split_fraction, "Training share of each chronological split");
    };

    auto* filter = app.add_subcommand("filter", "Filter, band and split a project table");
    add_common(filter);
    add_source(filter);
    filter->add_flag("--plots", f.plots, "Write size/effort scatter plots");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic project table");
    add_common(synth);
    synth->add_option("--synthetic-spec", f.synthetic_spec, "Synthetic data spec (JSON or TOML)");

    auto* bench = app.add_subcommand("bench", "Train and evaluate every model on every dataset");
    add_common(bench);
    add_source(bench);
    bench->add_option("--models", f.models, "Comma-separated model kinds (default: MLP,GRNN,RBFNN,CCNN)");
    bench->add_option("--alpha", f.alpha, "Significance level for the pairwise tests");
    bench->add_option("--threads", f.threads, "Worker threads (0: all cores)");
    bench->add_option("--importance-repeats", f.importance_repeats, "Permutations per input field");
    bench->add_flag("--plots", f.plots, "Write interval and scatter plots");
    bench->add_flag("--relative-metrics", f.relative_metrics, "Also report MMRE and MMER");
    bench->add_flag("--baseline", f.baseline, "Add the mean-effort predictor as a reference");

    auto* plot = app.add_subcommand("plot", "Render SVG plots from a report or datasets");
    add_common(plot);
    add_source(plot);
    plot->add_option("--kind", f.plot_kind, "scatter or interval")->required();
    plot->add_option("--report", f.report, "report.json written by `bench`");

    auto* report = app.add_subcommand("report", "Render a report.json as Markdown");
    add_common(report);
    report->add_option("--report", f.report, "report.json written by `bench`")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    auto given = [&](const char* name) {
        const auto* opt = sub->get_option_no_throw(name);
        return opt && opt->count() > 0;
    };
    try {
        if (given("--config")) apply_config_file(rc, f.config);
        if (f.plots) rc.plots = true;
        if (f.relative_metrics) rc.relative_metrics = true;
        if (f.baseline) rc.baseline = true;

        if (given("--input")) rc.input = f.input;
        if (given("--mapping")) rc.mapping = f.mapping;
        if (given("--synthetic-spec")) rc.synthetic_spec = f.synthetic_spec;
        if (given("--bands")) rc.bands = parse_edges(f.bands);
        if (given("--split-fraction")) rc.split_fraction = f.split_fraction;
        if (given("--models")) rc.models = parse_models(f.models);
        if (given("--seed")) rc.seed = f.seed;
        if (given("--alpha")) rc.alpha = f.alpha;
        if (given("--out")) rc.out = f.out;
        if (given("--threads")) rc.threads = f.threads;
        if (given("--importance-repeats")) rc.importance_repeats = f.importance_repeats;
        if (given("--report")) rc.report = f.report;
        rc.plot_kind = f.plot_kind;
        if (!(rc.split_fraction > 0.0 && rc.split_fraction < 1.0)) {
            throw ConfigError("--split-fraction must lie strictly between 0 and 1");
        }
        if (!(rc.alpha > 0.0 && rc.alpha < 1.0)) throw ConfigError("--alpha must lie strictly between 0 and 1");

        if (sub == filter) return cmd_filter(rc, out);
        if (sub == synth) return cmd_synth(rc, out);
        if (sub == bench) return cmd_bench(rc, out, err);
        if (sub == plot) return cmd_plot(rc, out);
        if (sub == report) return cmd_report(rc, out);
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace effortnn::cli
