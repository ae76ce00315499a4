#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace effortnn {

enum class WilcoxonMethod { exact, normal_approximation, degenerate };
std::string_view to_string(WilcoxonMethod method);

struct WilcoxonResult {
    double w_statistic = 0.0;  // min(W+, W-)
    double w_plus = 0.0;
    double w_minus = 0.0;
    double p_value = 1.0;
    std::size_t n_effective = 0;
    WilcoxonMethod method = WilcoxonMethod::exact;
    double alpha = 0.05;
    bool reject_null = false;
};

/// Paired two-sided signed-rank test on d = a - b. Zero differences are
/// dropped and tied |d| get average ranks. The exact null distribution is
/// used for n_effective <= 25 without ties, otherwise the normal
/// approximation with tie and continuity corrections.
///
/// All differences zero gives a degenerate result with p = 1. Fewer than
/// five non-zero differences throws InsufficientDataError.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

/// Two-sided exact p-value for statistic w = min(W+, W-) with n distinct
/// ranks 1..n.
double wilcoxon_exact_p(double w, std::size_t n);

inline constexpr std::size_t kWilcoxonExactLimit = 25;

enum class Normality { normal, non_normal };
std::string_view to_string(Normality verdict);

struct NormalityResult {
    double skewness = 0.0;         // moment estimate g1
    double excess_kurtosis = 0.0;  // moment estimate g2
    double skew_z = 0.0;
    double kurtosis_z = 0.0;
    double statistic = 0.0;  // K^2
    double p_value = 0.0;
    Normality verdict = Normality::normal;
    bool degenerate = false;
    std::string details;
};

/// D'Agostino-Pearson omnibus test. Requires n >= 8 (InsufficientDataError).
/// A zero-variance sample is reported as degenerate and non-normal.
NormalityResult normality_check(std::span<const double> sample, double alpha = 0.05);

struct StatsSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double stdev = 0.0;  // n - 1 denominator, 0 for a singleton
    double minimum = 0.0;
    double median = 0.0;
    double maximum = 0.0;
    /// Adjusted estimators G1 and G2 as computed by common spreadsheets.
    /// NaN when n < 3 (skewness), n < 4 (kurtosis), or the variance is zero.
    double skewness = 0.0;
    double kurtosis = 0.0;
};

/// Throws EmptyInputError for an empty sample.
StatsSummary descriptive_stats(std::span<const double> sample);

}  // namespace effortnn
