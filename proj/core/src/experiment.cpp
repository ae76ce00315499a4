#include "effortnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <thread>

#include "effortnn/error.hpp"
#include "effortnn/version.hpp"
#include "effortnn/model_io.hpp"
#include "effortnn/random.hpp"
#include "effortnn/table_io.hpp"

namespace effortnn {

namespace {

struct Job {
    std::size_t dataset = 0;
    std::optional<EstimatorConfig> config;  // nullopt: baseline
};

void fill_predictions(CellResult& cell, const DesignMatrix& test, const Eigen::VectorXd& predicted) {
    cell.project_ids = test.project_ids;
    cell.actual.assign(test.targets.data(), test.targets.data() + test.targets.size());
    cell.predicted.assign(predicted.data(), predicted.data() + predicted.size());
    cell.abs_residuals.resize(cell.actual.size());
    for (std::size_t i = 0; i < cell.actual.size(); ++i) cell.abs_residuals[i] = std::abs(cell.actual[i] - cell.predicted[i]);
}

void run_cell(CellResult& cell, const EncodedSplit& data, const Job& job, std::uint64_t seed,
              const BenchmarkOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    try {
        cell.warnings = data.warnings;
        if (!job.config) {
            const double mean = data.train.targets.mean();
            const Eigen::VectorXd predicted = Eigen::VectorXd::Constant(data.test.rows(), mean);
            fill_predictions(cell, data.test, predicted);
            cell.architecture = "mean of training effort";
        } else {
            EstimatorConfig config = *job.config;
            config.seed = seed;
            const EstimatorModel model = train(data.train, config);
            const auto preds = predict(model, data.test.features);
            for (const auto& p : preds) {
                cell.clamped_predictions += p.clamped ? 1 : 0;
                cell.fallback_predictions += p.nearest_neighbor_fallback ? 1 : 0;
            }
            fill_predictions(cell, data.test, predicted_effort(preds));
            cell.architecture = architecture_summary(model);
            cell.hidden = model.hidden_count();
            cell.trace = model.trace;
            cell.field_spreads = model.field_spreads;
            cell.significance = permutation_importance(model, data.test, options.importance_repeats, seed);
        }
        cell.metrics = evaluate_predictions(cell.actual, cell.predicted, options.relative_metrics);
        cell.bias = classify_bias(cell.metrics, options.bias_threshold);
        cell.ok = true;
    } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
    }
    cell.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string data_digest(std::span<const Split> datasets) {
    std::string all;
    for (const auto& s : datasets) {
        all += s.name + '\n';
        all += records_to_csv(s.train);
        all += records_to_csv(s.test);
    }
    return digest_hex(all);
}

}  // namespace

const CellResult* BenchmarkReport::cell(std::string_view dataset, std::string_view model) const {
    for (const auto& c : cells) {
        if (c.dataset == dataset && c.model == model) return &c;
    }
    return nullptr;
}

std::uint64_t dataset_seed(std::uint64_t seed, std::size_t index) {
    return RandomSource(seed).split(index).next_u64();
}

std::string architecture_summary(const EstimatorModel& model) {
    const auto d = std::to_string(model.input_dim());
    const auto h = std::to_string(model.hidden_count());
    switch (model.kind) {
        case ModelKind::mlp: return d + "-" + h + "-1 tanh";
        case ModelKind::rbfnn: return d + "-" + h + "-1 gaussian";
        case ModelKind::grnn: {
            std::string s = d + "-" + h + "-2-1, spreads";
            const auto fields = model.schema.fields();
            for (std::size_t i = 0; i < fields.size() && i < model.field_spreads.size(); ++i) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.3g", model.field_spreads[i]);
                s += (i ? ", " : " ") + fields[i] + "=" + buf;
            }
            return s;
        }
        case ModelKind::ccnn: return d + " inputs, " + h + " cascade units";
    }
    return {};
}

BenchmarkReport run_benchmark(std::span<const Split> datasets, std::span<const EstimatorConfig> configs,
                              std::uint64_t seed, const BenchmarkOptions& options) {
    if (configs.empty()) throw ConfigError("run_benchmark: no model configurations");
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (options.importance_repeats < 1) throw ConfigError("importance_repeats must be >= 1");
    for (const auto& c : configs) c.validate();
    const auto run_start = std::chrono::steady_clock::now();

    BenchmarkReport report;
    report.alpha = options.alpha;
    for (const auto& c : configs) report.models.emplace_back(to_string(c.kind));
    if (options.baseline) report.models.emplace_back(kBaselineName);

    std::vector<std::optional<EncodedSplit>> encoded(datasets.size());
    std::vector<std::string> encode_errors(datasets.size());
    std::vector<Job> jobs;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        DatasetEntry entry;
        entry.name = datasets[d].name;
        entry.train_size = datasets[d].train.size();
        entry.test_size = datasets[d].test.size();
        entry.seed = dataset_seed(seed, d);
        report.datasets.push_back(entry);
        try {
            encoded[d] = encode_features(datasets[d]);
        } catch (const Error& e) {
            encode_errors[d] = e.what();
        }
        for (const auto& c : configs) jobs.push_back({d, c});
        if (options.baseline) jobs.push_back({d, std::nullopt});
    }

    report.cells.resize(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        report.cells[i].dataset = datasets[jobs[i].dataset].name;
        report.cells[i].model = jobs[i].config ? std::string(to_string(jobs[i].config->kind)) : std::string(kBaselineName);
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto d = jobs[i].dataset;
            if (!encoded[d]) {
                report.cells[i].error = encode_errors[d];
                continue;
            }
            run_cell(report.cells[i], *encoded[d], jobs[i], report.datasets[d].seed, options);
        }
    };
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (auto& entry : report.datasets) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : configs) {
            const auto* cell = report.cell(entry.name, to_string(c.kind));
            if (cell && cell->ok && cell->metrics.mar < best) {
                best = cell->metrics.mar;
                entry.winner = cell->model;
            }
        }
        for (const auto& [a, b] : kWilcoxonPairs) {
            const auto* ca = report.cell(entry.name, to_string(a));
            const auto* cb = report.cell(entry.name, to_string(b));
            if (!ca || !cb) continue;
            PairwiseTest test{entry.name, ca->model, cb->model, std::nullopt, {}};
            if (!ca->ok || !cb->ok) {
                test.error = "model failed to train";
            } else {
                try {
                    test.result = wilcoxon_signed_rank(ca->abs_residuals, cb->abs_residuals, options.alpha);
                } catch (const Error& e) {
                    test.error = e.what();
                }
            }
            report.pairwise.push_back(std::move(test));
        }
        for (const auto& c : configs) {
            const auto* cell = report.cell(entry.name, to_string(c.kind));
            if (!cell) continue;
            NormalityEntry n{entry.name, cell->model, std::nullopt, {}};
            if (!cell->ok) {
                n.error = "model failed to train";
            } else {
                try {
                    n.result = normality_check(cell->abs_residuals, options.alpha);
                } catch (const Error& e) {
                    n.error = e.what();
                }
            }
            report.normality.push_back(std::move(n));
        }
    }

    nlohmann::json config_json = nlohmann::json::array();
    for (const auto& c : configs) config_json.push_back(c);
    report.metadata = {
        {"library_version", std::string(kVersion)},
        {"rng", std::string(RandomSource::algorithm)},
        {"seed", seed},
        {"configs", config_json},
        {"options",
         {{"alpha", options.alpha},
          {"relative_metrics", options.relative_metrics},
          {"baseline", options.baseline},
          {"importance_repeats", options.importance_repeats},
          {"bias_threshold", options.bias_threshold}}},
        {"data_digest", data_digest(datasets)},
        {"timestamp", utc_timestamp()},
        {"wall_clock_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count()},
    };
    return report;
}

}  // namespace effortnn
