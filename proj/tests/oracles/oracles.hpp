#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Written from the textbook definitions, without calling into the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double mean_abs_residual(const std::vector<double>& actual, const std::vector<double>& predicted) {
    long double total = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) total += std::fabs(static_cast<long double>(actual[i]) - predicted[i]);
    return static_cast<double>(total / actual.size());
}

inline double mean_residual(const std::vector<double>& actual, const std::vector<double>& predicted) {
    long double total = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) total += static_cast<long double>(actual[i]) - predicted[i];
    return static_cast<double>(total / actual.size());
}

inline double mmre(const std::vector<double>& actual, const std::vector<double>& predicted) {
    long double total = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) total += std::fabs(static_cast<long double>(actual[i]) - predicted[i]) / actual[i];
    return static_cast<double>(total / actual.size());
}

inline double mmer(const std::vector<double>& actual, const std::vector<double>& predicted) {
    long double total = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) total += std::fabs(static_cast<long double>(actual[i]) - predicted[i]) / predicted[i];
    return static_cast<double>(total / actual.size());
}

/// Two-sided signed-rank p-value by visiting all 2^n sign patterns of the
/// observed ranks: the share of patterns whose min(W+, W-) does not exceed
/// the observed one. Ranks of tied |d| are averaged.
inline double signed_rank_enumeration_p(const std::vector<double>& d) {
    const std::size_t n = d.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return std::fabs(d[i]) < std::fabs(d[j]); });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && std::fabs(d[idx[j]]) == std::fabs(d[idx[i]])) ++j;
        for (std::size_t k = i; k < j; ++k) rank[idx[k]] = (i + 1 + j) / 2.0;
        i = j;
    }
    double total = 0, observed_plus = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += rank[i];
        if (d[i] > 0) observed_plus += rank[i];
    }
    const double observed = std::min(observed_plus, total - observed_plus);
    std::uint64_t hits = 0;
    const std::uint64_t patterns = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        double plus = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1U) plus += rank[i];
        }
        if (std::min(plus, total - plus) <= observed + 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(patterns);
}

/// Normal-approximation two-sided p for W = min(W+, W-) with n distinct ranks
/// and continuity correction.
inline double signed_rank_normal_p(double w, int n) {
    const double mu = n * (n + 1) / 4.0;
    const double sigma = std::sqrt(n * (n + 1) * (2.0 * n + 1) / 24.0);
    const double z = (w - mu + 0.5) / sigma;
    return std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
}

/// Nadaraya-Watson estimate with a product Gaussian kernel, one bandwidth per column.
inline double nadaraya_watson(const std::vector<std::vector<double>>& patterns, const std::vector<double>& targets,
                              const std::vector<double>& bandwidths, const std::vector<double>& x) {
    long double num = 0, den = 0;
    for (std::size_t j = 0; j < patterns.size(); ++j) {
        long double weight = 1;
        for (std::size_t c = 0; c < x.size(); ++c) {
            const long double u = (x[c] - patterns[j][c]) / bandwidths[c];
            weight *= std::exp(-0.5L * u * u);
        }
        num += weight * targets[j];
        den += weight;
    }
    return static_cast<double>(num / den);
}

inline std::size_t nearest_pattern(const std::vector<std::vector<double>>& patterns, const std::vector<double>& bandwidths,
                                   const std::vector<double>& x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < patterns.size(); ++j) {
        double d = 0;
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double u = (x[c] - patterns[j][c]) / bandwidths[c];
            d += u * u;
        }
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

/// Training MSE of the ordinary least-squares fit of y on [x, 1], via the
/// complete orthogonal decomposition.
inline double linear_least_squares_mse(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::MatrixXd a(x.rows(), x.cols() + 1);
    a << x, Eigen::VectorXd::Ones(x.rows());
    const Eigen::VectorXd beta = a.completeOrthogonalDecomposition().solve(y);
    return (a * beta - y).squaredNorm() / static_cast<double>(y.size());
}

/// Adjusted (spreadsheet) skewness and excess kurtosis from first principles.
struct Shape {
    double skew;
    double kurt;
};
inline Shape adjusted_shape(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double s = std::sqrt(ss / (n - 1));
    double s3 = 0, s4 = 0;
    for (double v : x) {
        const double z = (v - mean) / s;
        s3 += z * z * z;
        s4 += z * z * z * z;
    }
    return {n / ((n - 1) * (n - 2)) * s3,
            n * (n + 1) / ((n - 1) * (n - 2) * (n - 3)) * s4 - 3 * (n - 1) * (n - 1) / ((n - 2) * (n - 3))};
}

}  // namespace oracle
