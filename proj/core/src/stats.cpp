#include "effortnn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "effortnn/error.hpp"

namespace effortnn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

struct Moments {
    double mean = 0.0;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;  // central, divided by n
};

Moments central_moments(std::span<const double> x) {
    Moments m;
    const auto n = static_cast<double>(x.size());
    m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    for (double v : x) {
        const double d = v - m.mean;
        const double d2 = d * d;
        m.m2 += d2;
        m.m3 += d2 * d;
        m.m4 += d2 * d2;
    }
    m.m2 /= n;
    m.m3 /= n;
    m.m4 /= n;
    return m;
}

double skew_z(double g1, double n) {
    const double y = g1 * std::sqrt(((n + 1) * (n + 3)) / (6.0 * (n - 2)));
    const double beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) / ((n - 2) * (n + 5) * (n + 7) * (n + 9));
    const double w2 = -1 + std::sqrt(2 * (beta2 - 1));
    const double delta = 1 / std::sqrt(0.5 * std::log(w2));
    const double alpha = std::sqrt(2.0 / (w2 - 1));
    const double r = y / alpha;
    return delta * std::log(r + std::sqrt(r * r + 1));
}

double kurtosis_z(double b2, double n) {
    const double e = 3.0 * (n - 1) / (n + 1);
    const double var_b2 = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) * (n + 1) * (n + 3) * (n + 5));
    const double x = (b2 - e) / std::sqrt(var_b2);
    const double sqrt_beta1 =
        6.0 * (n * n - 5 * n + 2) / ((n + 7) * (n + 9)) * std::sqrt((6.0 * (n + 3) * (n + 5)) / (n * (n - 2) * (n - 3)));
    const double a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + std::sqrt(1 + 4.0 / (sqrt_beta1 * sqrt_beta1)));
    const double term1 = 1 - 2 / (9.0 * a);
    const double denom = 1 + x * std::sqrt(2 / (a - 4.0));
    if (denom == 0.0) return kNaN;
    const double term2 = (denom > 0 ? 1.0 : -1.0) * std::cbrt((1 - 2.0 / a) / std::abs(denom));
    return (term1 - term2) / std::sqrt(2 / (9.0 * a));
}

}  // namespace

std::string_view to_string(WilcoxonMethod method) {
    switch (method) {
        case WilcoxonMethod::exact: return "exact";
        case WilcoxonMethod::normal_approximation: return "normal-approximation";
        case WilcoxonMethod::degenerate: return "degenerate";
    }
    return "exact";
}

std::string_view to_string(Normality verdict) {
    return verdict == Normality::normal ? "normal" : "non-normal";
}

double wilcoxon_exact_p(double w, std::size_t n) {
    if (n == 0) return 1.0;
    // counts[s] = number of sign assignments whose positive ranks sum to s
    const std::size_t total = n * (n + 1) / 2;
    std::vector<double> counts(total + 1, 0.0);
    counts[0] = 1.0;
    for (std::size_t r = 1; r <= n; ++r) {
        for (std::size_t s = total; s >= r; --s) counts[s] += counts[s - r];
    }
    const auto limit = static_cast<std::size_t>(std::floor(w + 1e-9));
    double tail = 0.0;
    for (std::size_t s = 0; s <= std::min(limit, total); ++s) tail += counts[s];
    return std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha) {
    if (a.size() != b.size()) throw DomainError("wilcoxon_signed_rank: samples differ in length");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("wilcoxon_signed_rank: alpha must lie in (0, 1)");
    WilcoxonResult result;
    result.alpha = alpha;

    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        if (!std::isfinite(diff)) throw DomainError("wilcoxon_signed_rank: non-finite difference");
        if (diff != 0.0) d.push_back(diff);
    }
    if (d.empty() && !a.empty()) {
        result.method = WilcoxonMethod::degenerate;
        return result;
    }
    const std::size_t n = d.size();
    result.n_effective = n;
    if (n < 5) {
        throw InsufficientDataError("wilcoxon_signed_rank: need at least 5 non-zero differences, got " +
                                    std::to_string(n));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return std::abs(d[i]) < std::abs(d[j]); });
    std::vector<double> rank(n);
    double tie_term = 0.0;
    bool ties = false;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
        const auto t = static_cast<double>(j - i);
        if (j - i > 1) {
            ties = true;
            tie_term += t * t * t - t;
        }
        i = j;
    }
    for (std::size_t i = 0; i < n; ++i) (d[i] > 0 ? result.w_plus : result.w_minus) += rank[i];
    result.w_statistic = std::min(result.w_plus, result.w_minus);

    const auto nd = static_cast<double>(n);
    if (n <= kWilcoxonExactLimit && !ties) {
        result.method = WilcoxonMethod::exact;
        result.p_value = wilcoxon_exact_p(result.w_statistic, n);
    } else {
        result.method = WilcoxonMethod::normal_approximation;
        const double mean = nd * (nd + 1) / 4.0;
        const double var = nd * (nd + 1) * (2 * nd + 1) / 24.0 - tie_term / 48.0;
        const double diff = result.w_statistic - mean;
        const double correction = diff > 0 ? 0.5 : (diff < 0 ? -0.5 : 0.0);
        const double z = var > 0 ? (diff - correction) / std::sqrt(var) : 0.0;
        result.p_value = std::min(1.0, two_sided_normal_p(z));
    }
    result.reject_null = result.p_value < alpha;
    return result;
}

NormalityResult normality_check(std::span<const double> sample, double alpha) {
    const std::size_t count = sample.size();
    if (count < 8) {
        throw InsufficientDataError("normality_check: need at least 8 observations, got " + std::to_string(count));
    }
    NormalityResult r;
    const auto m = central_moments(sample);
    if (!(m.m2 > 0.0)) {
        r.degenerate = true;
        r.verdict = Normality::non_normal;
        r.p_value = 0.0;
        r.skewness = kNaN;
        r.excess_kurtosis = kNaN;
        r.details = "zero variance: every value is identical";
        return r;
    }
    const auto n = static_cast<double>(count);
    r.skewness = m.m3 / std::pow(m.m2, 1.5);
    const double b2 = m.m4 / (m.m2 * m.m2);
    r.excess_kurtosis = b2 - 3.0;
    r.skew_z = skew_z(r.skewness, n);
    r.kurtosis_z = kurtosis_z(b2, n);
    r.statistic = r.skew_z * r.skew_z + r.kurtosis_z * r.kurtosis_z;
    if (!std::isfinite(r.statistic)) {
        r.verdict = Normality::non_normal;
        r.p_value = kNaN;
        r.details = "kurtosis statistic undefined for this sample";
        return r;
    }
    r.p_value = std::exp(-r.statistic / 2.0);  // chi-square survival, 2 degrees of freedom
    r.verdict = r.p_value < alpha ? Normality::non_normal : Normality::normal;
    r.details = "D'Agostino-Pearson K^2";
    if (count < 20) r.details += " (kurtosis z unreliable below 20 observations)";
    return r;
}

StatsSummary descriptive_stats(std::span<const double> sample) {
    if (sample.empty()) throw EmptyInputError("descriptive_stats: empty sample");
    StatsSummary s;
    s.count = sample.size();
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    s.minimum = sorted.front();
    s.maximum = sorted.back();
    const std::size_t mid = s.count / 2;
    s.median = s.count % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

    const auto n = static_cast<double>(s.count);
    const auto m = central_moments(sample);
    s.mean = m.mean;
    if (s.count < 2) {
        s.stdev = 0.0;
        s.skewness = kNaN;
        s.kurtosis = kNaN;
        return s;
    }
    const double var = m.m2 * n / (n - 1);
    s.stdev = std::sqrt(var);
    if (!(var > 0.0)) {
        s.skewness = kNaN;
        s.kurtosis = kNaN;
        return s;
    }
    // Sums of standardized powers with the sample sd.
    const double z3 = m.m3 * n / (var * s.stdev);
    const double z4 = m.m4 * n / (var * var);
    s.skewness = s.count >= 3 ? n / ((n - 1) * (n - 2)) * z3 : kNaN;
    s.kurtosis = s.count >= 4 ? n * (n + 1) / ((n - 1) * (n - 2) * (n - 3)) * z4 -
                                    3 * (n - 1) * (n - 1) / ((n - 2) * (n - 3))
                              : kNaN;
    return s;
}

}  // namespace effortnn
