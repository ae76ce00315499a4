#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace effortnn {

/// General regression network. Prediction at x is
///   sum_j y_j K(x, x_j) / sum_j K(x, x_j),
///   K(x, x_j) = exp(-sum_d (x_d - x_jd)^2 / (2 s_d^2)),
/// with one spread s_d per feature column. The pattern layer is the full
/// training matrix.
struct GrnnModel {
    Eigen::MatrixXd patterns;  // n x d
    Eigen::VectorXd targets;   // n
    Eigen::VectorXd spreads;   // d

    struct Output {
        double value = 0.0;
        /// Every absolute kernel weight underflows. The value still comes from
        /// weights taken relative to the nearest pattern, so it tends to that
        /// pattern's target.
        bool nearest_neighbor_fallback = false;
    };
    Output predict(std::span<const double> x) const;
};

/// One spread per input field, expanded over that field's columns.
Eigen::VectorXd expand_field_spreads(const std::vector<double>& field_spreads,
                                     const std::vector<Eigen::Index>& block_widths);

/// Precomputes per-field squared distances so that the cross-validated error
/// of any spread assignment costs O(n^2).
class GrnnSpreadSearch {
public:
    GrnnSpreadSearch(const Eigen::MatrixXd& x, Eigen::VectorXd y, const std::vector<Eigen::Index>& block_widths,
                     std::vector<std::vector<Eigen::Index>> folds);

    /// Mean absolute residual over all points, each predicted from the
    /// training points outside its own fold.
    double cross_validated_mar(const std::vector<double>& field_spreads) const;

    /// Coordinate descent over `grid` (applied to every field), `sweeps`
    /// passes, starting from the grid's middle point. Strict improvement
    /// only, so ties keep the earlier value.
    std::vector<double> coordinate_descent(const std::vector<double>& grid, int sweeps) const;

private:
    Eigen::VectorXd y_;
    std::vector<Eigen::MatrixXd> field_sq_dist_;  // per field, n x n
    std::vector<int> fold_of_;
};

/// Log-spaced grid of `steps` points over [lower, upper].
std::vector<double> log_grid(double lower, double upper, int steps);

}  // namespace effortnn
