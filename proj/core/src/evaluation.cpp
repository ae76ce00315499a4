#include "effortnn/evaluation.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "effortnn/error.hpp"
#include "effortnn/random.hpp"

namespace effortnn {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> predicted, const char* who) {
    if (actual.size() != predicted.size()) {
        throw DomainError(std::string(who) + ": length mismatch (" + std::to_string(actual.size()) + " vs " +
                          std::to_string(predicted.size()) + ")");
    }
    if (actual.empty()) throw DomainError(std::string(who) + ": no observations");
}

// Neumaier summation; keeps the means within an ulp or so of the exact value.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0, comp_ = 0.0;
};

}  // namespace

double mar(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted, "mar");
    CompensatedSum s;
    for (std::size_t i = 0; i < actual.size(); ++i) s.add(std::abs(actual[i] - predicted[i]));
    return s.value() / static_cast<double>(actual.size());
}

double mr(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted, "mr");
    CompensatedSum s;
    for (std::size_t i = 0; i < actual.size(); ++i) s.add(actual[i] - predicted[i]);
    return s.value() / static_cast<double>(actual.size());
}

RelativeMetrics optional_relative_metrics(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted, "optional_relative_metrics");
    RelativeMetrics out;
    const auto n = static_cast<double>(actual.size());
    bool actual_ok = true, predicted_ok = true;
    CompensatedSum re, er;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double abs_res = std::abs(actual[i] - predicted[i]);
        if (actual[i] > 0.0) re.add(abs_res / actual[i]);
        else actual_ok = false;
        if (predicted[i] > 0.0) er.add(abs_res / predicted[i]);
        else predicted_ok = false;
    }
    if (actual_ok) out.mmre = re.value() / n;
    if (predicted_ok) out.mmer = er.value() / n;
    return out;
}

MetricResult evaluate_predictions(std::span<const double> actual, std::span<const double> predicted,
                                  bool relative_metrics) {
    MetricResult m;
    m.mar = mar(actual, predicted);
    m.mr = mr(actual, predicted);
    m.n = actual.size();
    if (relative_metrics) {
        const auto rel = optional_relative_metrics(actual, predicted);
        m.mmre = rel.mmre;
        m.mmer = rel.mmer;
    }
    return m;
}

std::string_view to_string(Bias bias) {
    switch (bias) {
        case Bias::overestimates: return "overestimates";
        case Bias::underestimates: return "underestimates";
        case Bias::neutral: return "neutral";
    }
    return "neutral";
}

BiasVerdict classify_bias(const MetricResult& metric, double threshold) {
    if (!(threshold >= 0.0)) throw DomainError("classify_bias: threshold must be non-negative");
    BiasVerdict v;
    v.threshold = threshold;
    if (metric.mr < -threshold) v.verdict = Bias::overestimates;
    else if (metric.mr > threshold) v.verdict = Bias::underestimates;
    return v;
}

std::vector<Fold> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) {
        throw DomainError("kfold_indices: need 2 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    }
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    RandomSource rng(seed);
    rng.shuffle(std::span<Eigen::Index>(order));

    std::vector<Fold> folds(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                        order.begin() + static_cast<std::ptrdiff_t>(pos + size));
        pos += size;
    }
    return folds;
}

}  // namespace effortnn
