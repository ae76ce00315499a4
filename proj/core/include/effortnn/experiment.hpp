#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "effortnn/dataset.hpp"
#include "effortnn/estimators.hpp"
#include "effortnn/evaluation.hpp"
#include "effortnn/stats.hpp"

namespace effortnn {

/// Name used for the mean-of-training-effort reference predictor.
inline constexpr std::string_view kBaselineName = "Baseline";

/// Pairs compared with the signed-rank test, in report column order.
inline constexpr std::array<std::pair<ModelKind, ModelKind>, 5> kWilcoxonPairs = {{
    {ModelKind::ccnn, ModelKind::mlp},
    {ModelKind::ccnn, ModelKind::grnn},
    {ModelKind::ccnn, ModelKind::rbfnn},
    {ModelKind::rbfnn, ModelKind::mlp},
    {ModelKind::rbfnn, ModelKind::grnn},
}};

struct BenchmarkOptions {
    double alpha = 0.05;
    bool relative_metrics = false;
    bool baseline = false;
    int importance_repeats = 20;
    double bias_threshold = 0.0;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct CellResult {
    std::string dataset;
    std::string model;  // "MLP", ..., or kBaselineName
    bool ok = false;
    std::string error;

    MetricResult metrics;
    BiasVerdict bias;
    SignificanceRanking significance;
    std::string architecture;
    int hidden = 0;
    std::vector<GrowthStep> trace;
    std::vector<double> field_spreads;
    double wall_clock_seconds = 0.0;

    std::vector<std::string> project_ids;  // test side
    std::vector<double> actual;
    std::vector<double> predicted;
    std::vector<double> abs_residuals;
    std::size_t clamped_predictions = 0;
    std::size_t fallback_predictions = 0;
    std::vector<std::string> warnings;
};

struct PairwiseTest {
    std::string dataset;
    std::string model_a;
    std::string model_b;
    std::optional<WilcoxonResult> result;
    std::string error;
};

struct NormalityEntry {
    std::string dataset;
    std::string model;
    std::optional<NormalityResult> result;
    std::string error;
};

struct DatasetEntry {
    std::string name;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::uint64_t seed = 0;  // shared by every model on this dataset
    std::optional<std::string> winner;  // minimal test MAR among the networks
};

struct BenchmarkReport {
    std::vector<DatasetEntry> datasets;
    std::vector<std::string> models;  // column order, baseline last when present
    std::vector<CellResult> cells;    // dataset-major
    std::vector<PairwiseTest> pairwise;
    std::vector<NormalityEntry> normality;
    double alpha = 0.05;
    nlohmann::json metadata;

    const CellResult* cell(std::string_view dataset, std::string_view model) const;
};

/// Trains every config on every split's train side, evaluates on the test
/// side, ranks input significance on the test side, and runs the pairwise
/// and normality tests on per-project absolute residuals. All models on a
/// dataset share one derived seed, so their folds coincide. Cell failures
/// are recorded, not thrown.
BenchmarkReport run_benchmark(std::span<const Split> datasets, std::span<const EstimatorConfig> configs,
                              std::uint64_t seed, const BenchmarkOptions& options = {});

/// Seed shared by all models on dataset `index`.
std::uint64_t dataset_seed(std::uint64_t seed, std::size_t index);

/// "d-h-1" style summary of a trained network.
std::string architecture_summary(const EstimatorModel& model);

}  // namespace effortnn
