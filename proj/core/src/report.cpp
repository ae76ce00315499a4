#include "effortnn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "effortnn/error.hpp"

namespace effortnn {

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

std::string fixed(double v, int decimals) {
    if (!std::isfinite(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

json wilcoxon_json(const WilcoxonResult& r) {
    return {{"w_statistic", r.w_statistic}, {"w_plus", r.w_plus},         {"w_minus", r.w_minus},
            {"p_value", r.p_value},         {"n_effective", r.n_effective}, {"method", std::string(to_string(r.method))},
            {"alpha", r.alpha},             {"reject_null", r.reject_null}};
}

WilcoxonResult wilcoxon_from(const json& j) {
    WilcoxonResult r;
    r.w_statistic = j.at("w_statistic").get<double>();
    r.w_plus = j.at("w_plus").get<double>();
    r.w_minus = j.at("w_minus").get<double>();
    r.p_value = j.at("p_value").get<double>();
    r.n_effective = j.at("n_effective").get<std::size_t>();
    const auto m = j.at("method").get<std::string>();
    r.method = m == "exact" ? WilcoxonMethod::exact
               : m == "degenerate" ? WilcoxonMethod::degenerate
                                   : WilcoxonMethod::normal_approximation;
    r.alpha = j.at("alpha").get<double>();
    r.reject_null = j.at("reject_null").get<bool>();
    return r;
}

json normality_json(const NormalityResult& r) {
    return {{"skewness", num(r.skewness)},
            {"excess_kurtosis", num(r.excess_kurtosis)},
            {"skew_z", num(r.skew_z)},
            {"kurtosis_z", num(r.kurtosis_z)},
            {"statistic", num(r.statistic)},
            {"p_value", num(r.p_value)},
            {"verdict", std::string(to_string(r.verdict))},
            {"degenerate", r.degenerate},
            {"details", r.details}};
}

NormalityResult normality_from(const json& j) {
    NormalityResult r;
    r.skewness = num_from(j.at("skewness"));
    r.excess_kurtosis = num_from(j.at("excess_kurtosis"));
    r.skew_z = num_from(j.at("skew_z"));
    r.kurtosis_z = num_from(j.at("kurtosis_z"));
    r.statistic = num_from(j.at("statistic"));
    r.p_value = num_from(j.at("p_value"));
    r.verdict = j.at("verdict").get<std::string>() == "normal" ? Normality::normal : Normality::non_normal;
    r.degenerate = j.at("degenerate").get<bool>();
    r.details = j.at("details").get<std::string>();
    return r;
}

json cell_json(const CellResult& c) {
    json sig = json::array();
    for (const auto& s : c.significance) sig.push_back({{"field", s.field}, {"score", s.score}, {"rank", s.rank}});
    json trace = json::array();
    for (const auto& t : c.trace) {
        trace.push_back({{"hidden", t.hidden}, {"training_error", num(t.training_error)}, {"validation_error", opt(t.validation_error)}});
    }
    return {{"dataset", c.dataset},
            {"model", c.model},
            {"ok", c.ok},
            {"error", c.ok ? json(nullptr) : json(c.error)},
            {"metrics",
             {{"mar", c.metrics.mar}, {"mr", c.metrics.mr}, {"n", c.metrics.n}, {"mmre", opt(c.metrics.mmre)},
              {"mmer", opt(c.metrics.mmer)}}},
            {"bias", {{"verdict", std::string(to_string(c.bias.verdict))}, {"threshold", c.bias.threshold}}},
            {"significance", sig},
            {"architecture", c.architecture},
            {"hidden", c.hidden},
            {"trace", trace},
            {"field_spreads", c.field_spreads},
            {"wall_clock_seconds", c.wall_clock_seconds},
            {"project_ids", c.project_ids},
            {"actual", c.actual},
            {"predicted", c.predicted},
            {"abs_residuals", c.abs_residuals},
            {"clamped_predictions", c.clamped_predictions},
            {"fallback_predictions", c.fallback_predictions},
            {"warnings", c.warnings}};
}

CellResult cell_from(const json& j) {
    CellResult c;
    c.dataset = j.at("dataset").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.ok = j.at("ok").get<bool>();
    if (!j.at("error").is_null()) c.error = j.at("error").get<std::string>();
    const auto& m = j.at("metrics");
    c.metrics.mar = m.at("mar").get<double>();
    c.metrics.mr = m.at("mr").get<double>();
    c.metrics.n = m.at("n").get<std::size_t>();
    c.metrics.mmre = opt_from(m.at("mmre"));
    c.metrics.mmer = opt_from(m.at("mmer"));
    const auto verdict = j.at("bias").at("verdict").get<std::string>();
    c.bias.verdict = verdict == "overestimates"    ? Bias::overestimates
                     : verdict == "underestimates" ? Bias::underestimates
                                                   : Bias::neutral;
    c.bias.threshold = j.at("bias").at("threshold").get<double>();
    for (const auto& s : j.at("significance")) {
        c.significance.push_back({s.at("field").get<std::string>(), s.at("score").get<double>(), s.at("rank").get<int>()});
    }
    c.architecture = j.at("architecture").get<std::string>();
    c.hidden = j.at("hidden").get<int>();
    for (const auto& t : j.at("trace")) {
        c.trace.push_back({t.at("hidden").get<int>(), num_from(t.at("training_error")), opt_from(t.at("validation_error"))});
    }
    c.field_spreads = j.at("field_spreads").get<std::vector<double>>();
    c.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    c.project_ids = j.at("project_ids").get<std::vector<std::string>>();
    c.actual = j.at("actual").get<std::vector<double>>();
    c.predicted = j.at("predicted").get<std::vector<double>>();
    c.abs_residuals = j.at("abs_residuals").get<std::vector<double>>();
    c.clamped_predictions = j.at("clamped_predictions").get<std::size_t>();
    c.fallback_predictions = j.at("fallback_predictions").get<std::size_t>();
    c.warnings = j.at("warnings").get<std::vector<std::string>>();
    return c;
}

std::string model_letter(std::string_view model) {
    if (model == "MLP") return "M";
    if (model == "GRNN") return "G";
    if (model == "RBFNN") return "R";
    if (model == "CCNN") return "C";
    return std::string(model);
}

bool is_network(std::string_view model) { return model != kBaselineName; }

}  // namespace

std::string field_abbreviation(std::string_view field) {
    if (field == "afp") return "AFP";
    if (field == "development_platform") return "DP";
    if (field == "language_type") return "LT";
    if (field == "resource_level") return "RL";
    return std::string(field);
}

json report_to_json(const BenchmarkReport& report) {
    json datasets = json::array();
    for (const auto& d : report.datasets) {
        datasets.push_back({{"name", d.name},
                            {"train_size", d.train_size},
                            {"test_size", d.test_size},
                            {"seed", d.seed},
                            {"winner", d.winner ? json(*d.winner) : json(nullptr)}});
    }
    json cells = json::array();
    for (const auto& c : report.cells) cells.push_back(cell_json(c));
    json pairwise = json::array();
    for (const auto& p : report.pairwise) {
        pairwise.push_back({{"dataset", p.dataset},
                            {"model_a", p.model_a},
                            {"model_b", p.model_b},
                            {"result", p.result ? wilcoxon_json(*p.result) : json(nullptr)},
                            {"error", p.result ? json(nullptr) : json(p.error)}});
    }
    json normality = json::array();
    for (const auto& n : report.normality) {
        normality.push_back({{"dataset", n.dataset},
                             {"model", n.model},
                             {"result", n.result ? normality_json(*n.result) : json(nullptr)},
                             {"error", n.result ? json(nullptr) : json(n.error)}});
    }
    return {{"format", "effortnn-benchmark-report"},
            {"alpha", report.alpha},
            {"models", report.models},
            {"datasets", datasets},
            {"cells", cells},
            {"pairwise", pairwise},
            {"normality", normality},
            {"metadata", report.metadata}};
}

BenchmarkReport report_from_json(const json& j) {
    try {
        if (j.value("format", std::string{}) != "effortnn-benchmark-report") {
            throw ConfigError("not an effortnn benchmark report");
        }
        BenchmarkReport r;
        r.alpha = j.at("alpha").get<double>();
        r.models = j.at("models").get<std::vector<std::string>>();
        for (const auto& d : j.at("datasets")) {
            DatasetEntry e;
            e.name = d.at("name").get<std::string>();
            e.train_size = d.at("train_size").get<std::size_t>();
            e.test_size = d.at("test_size").get<std::size_t>();
            e.seed = d.at("seed").get<std::uint64_t>();
            if (!d.at("winner").is_null()) e.winner = d.at("winner").get<std::string>();
            r.datasets.push_back(std::move(e));
        }
        for (const auto& c : j.at("cells")) r.cells.push_back(cell_from(c));
        for (const auto& p : j.at("pairwise")) {
            PairwiseTest t{p.at("dataset").get<std::string>(), p.at("model_a").get<std::string>(),
                           p.at("model_b").get<std::string>(), std::nullopt, {}};
            if (!p.at("result").is_null()) t.result = wilcoxon_from(p.at("result"));
            if (!p.at("error").is_null()) t.error = p.at("error").get<std::string>();
            r.pairwise.push_back(std::move(t));
        }
        for (const auto& n : j.at("normality")) {
            NormalityEntry e{n.at("dataset").get<std::string>(), n.at("model").get<std::string>(), std::nullopt, {}};
            if (!n.at("result").is_null()) e.result = normality_from(n.at("result"));
            if (!n.at("error").is_null()) e.error = n.at("error").get<std::string>();
            r.normality.push_back(std::move(e));
        }
        r.metadata = j.at("metadata");
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed benchmark report: ") + e.what());
    }
}

json without_timing(json report) {
    if (report.contains("metadata")) {
        report["metadata"].erase("timestamp");
        report["metadata"].erase("wall_clock_seconds");
    }
    if (report.contains("cells")) {
        for (auto& c : report["cells"]) c.erase("wall_clock_seconds");
    }
    return report;
}

std::string render_wilcoxon_table(const BenchmarkReport& report) {
    if (report.pairwise.empty()) return {};
    std::vector<std::pair<std::string, std::string>> columns;
    for (const auto& p : report.pairwise) {
        const std::pair<std::string, std::string> key{p.model_a, p.model_b};
        if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
    }
    std::ostringstream out;
    out << "| Dataset |";
    for (const auto& [a, b] : columns) out << ' ' << a << " vs " << b << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < columns.size(); ++i) out << "---:|";
    out << '\n';
    for (const auto& d : report.datasets) {
        out << "| " << d.name << " |";
        for (const auto& [a, b] : columns) {
            const PairwiseTest* found = nullptr;
            for (const auto& p : report.pairwise) {
                if (p.dataset == d.name && p.model_a == a && p.model_b == b) found = &p;
            }
            if (!found || !found->result) out << " n/a |";
            else out << ' ' << fixed(found->result->p_value, 2) << (found->result->reject_null ? "*" : "") << " |";
        }
        out << '\n';
    }
    out << "\n`*` rejects equal residual distributions at alpha = " << fixed(report.alpha, 2)
        << " (two-sided signed-rank test on per-project absolute residuals).\n";
    return out.str();
}

std::string render_markdown(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "# Benchmark report\n\n";

    auto metric_table = [&](const char* title, auto value) {
        out << "## " << title << "\n\n| Dataset |";
        for (const auto& m : report.models) out << ' ' << m << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < report.models.size(); ++i) out << "---:|";
        out << '\n';
        for (const auto& d : report.datasets) {
            out << "| " << d.name << " |";
            for (const auto& m : report.models) {
                const auto* c = report.cell(d.name, m);
                if (!c || !c->ok) out << " failed |";
                else {
                    const bool best = d.winner && *d.winner == m;
                    out << ' ' << (best ? "**" : "") << value(*c) << (best ? "**" : "") << " |";
                }
            }
            out << '\n';
        }
        out << '\n';
    };
    metric_table("Mean absolute residual (MAR, person-hours)", [](const CellResult& c) { return fixed(c.metrics.mar, 1); });
    metric_table("Mean residual (MR, person-hours)", [](const CellResult& c) { return fixed(c.metrics.mr, 1); });
    metric_table("Bias", [](const CellResult& c) { return std::string(to_string(c.bias.verdict)); });

    bool any_relative = false;
    for (const auto& c : report.cells) any_relative = any_relative || c.metrics.mmre || c.metrics.mmer;
    if (any_relative) {
        metric_table("MMRE", [](const CellResult& c) { return c.metrics.mmre ? fixed(*c.metrics.mmre, 3) : "undefined"; });
        metric_table("MMER", [](const CellResult& c) { return c.metrics.mmer ? fixed(*c.metrics.mmer, 3) : "undefined"; });
    }

    out << "## Best model per dataset\n\n";
    for (const auto& d : report.datasets) {
        out << "- " << d.name << ": ";
        if (d.winner) out << *d.winner << " (MAR " << fixed(report.cell(d.name, *d.winner)->metrics.mar, 1) << ")\n";
        else out << "no model trained\n";
    }
    out << '\n';

    out << "## Architectures\n\n| Dataset | Model | Hidden | Architecture |\n|---|---|---:|---|\n";
    for (const auto& c : report.cells) {
        if (!is_network(c.model)) continue;
        out << "| " << c.dataset << " | " << c.model << " | ";
        if (c.ok) out << c.hidden << " | " << c.architecture << " |\n";
        else out << "- | failed: " << c.error << " |\n";
    }
    out << '\n';

    std::vector<std::string> networks;
    for (const auto& m : report.models) {
        if (is_network(m)) networks.push_back(m);
    }
    std::vector<std::string> fields;
    for (const auto& c : report.cells) {
        for (const auto& s : c.significance) {
            if (std::find(fields.begin(), fields.end(), s.field) == fields.end()) fields.push_back(s.field);
        }
    }
    if (!fields.empty()) {
        std::sort(fields.begin(), fields.end(), [](const std::string& a, const std::string& b) {
            return (a == "afp") != (b == "afp") ? a == "afp" : a < b;
        });
        out << "## Input significance (1 = most significant)\n\n| Dataset |";
        for (const auto& f : fields) {
            for (const auto& m : networks) out << ' ' << field_abbreviation(f) << ' ' << model_letter(m) << " |";
        }
        out << "\n|---|";
        for (std::size_t i = 0; i < fields.size() * networks.size(); ++i) out << "---:|";
        out << '\n';
        for (const auto& d : report.datasets) {
            out << "| " << d.name << " |";
            for (const auto& f : fields) {
                for (const auto& m : networks) {
                    const auto* c = report.cell(d.name, m);
                    std::string rank = "-";
                    if (c && c->ok) {
                        for (const auto& s : c->significance) {
                            if (s.field == f) rank = std::to_string(s.rank);
                        }
                    }
                    out << ' ' << rank << " |";
                }
            }
            out << '\n';
        }
        out << "\nAFP = size, DP = development platform, LT = language type, RL = resource level; ";
        out << "M = MLP, G = GRNN, R = RBFNN, C = CCNN. Ranks come from permutation importance on the test side.\n\n";
    }

    const auto wilcoxon = render_wilcoxon_table(report);
    if (!wilcoxon.empty()) out << "## Signed-rank test p-values\n\n" << wilcoxon << '\n';

    bool any_normality = false;
    for (const auto& n : report.normality) any_normality = any_normality || n.result.has_value();
    if (any_normality) {
        out << "## Normality of absolute residuals\n\n| Dataset | Model | p-value | Verdict |\n|---|---|---:|---|\n";
        for (const auto& n : report.normality) {
            out << "| " << n.dataset << " | " << n.model << " | ";
            if (n.result) out << fixed(n.result->p_value, 3) << " | " << to_string(n.result->verdict) << " |\n";
            else out << "- | " << n.error << " |\n";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace effortnn
