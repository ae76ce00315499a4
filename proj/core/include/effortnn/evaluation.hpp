#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace effortnn {

/// Mean absolute residual, sum |actual - predicted| / n.
double mar(std::span<const double> actual, std::span<const double> predicted);

/// Mean residual, sum (actual - predicted) / n. Negative means overestimation.
double mr(std::span<const double> actual, std::span<const double> predicted);

inline std::span<const double> values_of(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

struct RelativeMetrics {
    std::optional<double> mmre;  // undefined when some actual <= 0
    std::optional<double> mmer;  // undefined when some prediction <= 0
};

RelativeMetrics optional_relative_metrics(std::span<const double> actual, std::span<const double> predicted);

struct MetricResult {
    double mar = 0.0;
    double mr = 0.0;
    std::size_t n = 0;
    std::optional<double> mmre;
    std::optional<double> mmer;
};

MetricResult evaluate_predictions(std::span<const double> actual, std::span<const double> predicted,
                                  bool relative_metrics = false);

enum class Bias { overestimates, underestimates, neutral };
std::string_view to_string(Bias bias);

struct BiasVerdict {
    Bias verdict = Bias::neutral;
    double threshold = 0.0;
};

/// overestimates iff mr < -threshold; underestimates iff mr > threshold.
BiasVerdict classify_bias(const MetricResult& metric, double threshold = 0.0);

using Fold = std::vector<Eigen::Index>;

/// k disjoint folds partitioning 0..n-1 after a seeded shuffle; the first
/// n mod k folds hold one extra index. Requires 2 <= k <= n.
std::vector<Fold> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace effortnn
