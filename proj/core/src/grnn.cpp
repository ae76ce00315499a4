#include "effortnn/grnn.hpp"

#include <cmath>
#include <limits>

#include "effortnn/error.hpp"

namespace effortnn {

GrnnModel::Output GrnnModel::predict(std::span<const double> x) const {
    const Eigen::Index d = patterns.cols();
    if (static_cast<Eigen::Index>(x.size()) != d) throw DomainError("GrnnModel::predict: feature dimension mismatch");
    const Eigen::Map<const Eigen::RowVectorXd> query(x.data(), d);
    const Eigen::RowVectorXd inv_two_s2 = (2.0 * spreads.array().square()).inverse().matrix().transpose();

    Eigen::VectorXd exponents(patterns.rows());
    for (Eigen::Index j = 0; j < patterns.rows(); ++j) {
        exponents[j] = ((patterns.row(j) - query).array().square() * inv_two_s2.array()).sum();
    }
    Eigen::Index nearest_index = 0;
    const double nearest = exponents.minCoeff(&nearest_index);
    if (!std::isfinite(nearest)) return {targets[nearest_index], true};

    // Weights relative to the nearest pattern, so the ratio survives when
    // every absolute weight would underflow.
    double numerator = 0.0, denominator = 0.0;
    for (Eigen::Index j = 0; j < patterns.rows(); ++j) {
        const double k = std::exp(nearest - exponents[j]);
        numerator += targets[j] * k;
        denominator += k;
    }
    const bool underflow = std::exp(-nearest) == 0.0;
    return {numerator / denominator, underflow};
}

Eigen::VectorXd expand_field_spreads(const std::vector<double>& field_spreads,
                                     const std::vector<Eigen::Index>& block_widths) {
    if (field_spreads.size() != block_widths.size()) throw DomainError("expand_field_spreads: size mismatch");
    Eigen::Index total = 0;
    for (auto w : block_widths) total += w;
    Eigen::VectorXd s(total);
    Eigen::Index k = 0;
    for (std::size_t f = 0; f < block_widths.size(); ++f)
        for (Eigen::Index c = 0; c < block_widths[f]; ++c) s[k++] = field_spreads[f];
    return s;
}

std::vector<double> log_grid(double lower, double upper, int steps) {
    if (!(lower > 0.0) || !(upper >= lower) || steps < 1) throw DomainError("log_grid: invalid range");
    std::vector<double> g;
    if (steps == 1) return {lower};
    const double ratio = std::log(upper / lower);
    for (int i = 0; i < steps; ++i) g.push_back(lower * std::exp(ratio * i / (steps - 1)));
    g.back() = upper;
    return g;
}

GrnnSpreadSearch::GrnnSpreadSearch(const Eigen::MatrixXd& x, Eigen::VectorXd y,
                                   const std::vector<Eigen::Index>& block_widths,
                                   std::vector<std::vector<Eigen::Index>> folds)
    : y_(std::move(y)) {
    const Eigen::Index n = x.rows();
    fold_of_.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t f = 0; f < folds.size(); ++f)
        for (auto i : folds[f]) fold_of_[static_cast<std::size_t>(i)] = static_cast<int>(f);

    Eigen::Index start = 0;
    for (auto width : block_widths) {
        Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double v = (x.row(i).segment(start, width) - x.row(j).segment(start, width)).squaredNorm();
                sq(i, j) = sq(j, i) = v;
            }
        }
        field_sq_dist_.push_back(std::move(sq));
        start += width;
    }
}

double GrnnSpreadSearch::cross_validated_mar(const std::vector<double>& field_spreads) const {
    const Eigen::Index n = y_.size();
    Eigen::MatrixXd exponent = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t f = 0; f < field_sq_dist_.size(); ++f) {
        exponent += field_sq_dist_[f] / (2.0 * field_spreads[f] * field_spreads[f]);
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (fold_of_[static_cast<std::size_t>(j)] != fold_of_[static_cast<std::size_t>(i)])
                nearest = std::min(nearest, exponent(i, j));
        }
        if (!std::isfinite(nearest)) continue;  // single fold: nothing to predict from
        double num = 0.0, den = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (fold_of_[static_cast<std::size_t>(j)] == fold_of_[static_cast<std::size_t>(i)]) continue;
            const double k = std::exp(nearest - exponent(i, j));
            num += y_[j] * k;
            den += k;
        }
        const double pred = num / den;
        total += std::abs(y_[i] - pred);
    }
    return total / static_cast<double>(n);
}

std::vector<double> GrnnSpreadSearch::coordinate_descent(const std::vector<double>& grid, int sweeps) const {
    std::vector<double> spreads(field_sq_dist_.size(), grid[grid.size() / 2]);
    double best = cross_validated_mar(spreads);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t f = 0; f < spreads.size(); ++f) {
            double chosen = spreads[f];
            for (double candidate : grid) {
                if (candidate == chosen) continue;
                spreads[f] = candidate;
                const double err = cross_validated_mar(spreads);
                if (err < best) {
                    best = err;
                    chosen = candidate;
                }
            }
            spreads[f] = chosen;
        }
    }
    return spreads;
}

}  // namespace effortnn
