#pragma once

#include <vector>

#include <Eigen/Core>

namespace effortnn {

/// Gaussian hidden layer (one spread per center) with a linear output.
struct RbfNetwork {
    Eigen::MatrixXd centers;         // m x d
    Eigen::VectorXd spreads;         // m
    Eigen::VectorXd output_weights;  // m
    double output_bias = 0.0;

    Eigen::Index hidden_count() const { return centers.rows(); }
    Eigen::VectorXd forward(const Eigen::MatrixXd& x) const;
};

/// n x m matrix of kernel activations.
Eigen::MatrixXd rbf_activations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                                const Eigen::VectorXd& spreads);

/// Spread of each center = median distance to its k nearest co-centers.
/// With fewer than two centers, or a zero median, `fallback` is used.
Eigen::VectorXd rbf_spreads(const Eigen::MatrixXd& centers, int k_neighbors, double fallback);

/// Median of all pairwise Euclidean distances between rows; 1 when undefined or zero.
double median_pairwise_distance(const Eigen::MatrixXd& x);

/// Solves the output layer by ridge least squares for fixed centers and spreads.
RbfNetwork fit_rbf_output(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::MatrixXd centers,
                          Eigen::VectorXd spreads, double ridge);

/// Greedy forward selection of centers from the training points. Each step
/// scores every unused point by the drop in training residual its kernel
/// column gives once orthogonalized against the current columns, adds the
/// best, recomputes all spreads, and re-solves the output layer.
class RbfForwardSelector {
public:
    RbfForwardSelector(Eigen::MatrixXd x, Eigen::VectorXd y, double ridge, int k_neighbors);

    /// Adds one center. Returns false when no candidate reduces the residual.
    bool add_center();

    const RbfNetwork& network() const { return network_; }
    double training_mse() const { return training_mse_; }
    Eigen::Index center_count() const { return static_cast<Eigen::Index>(selected_.size()); }
    const std::vector<Eigen::Index>& selected() const { return selected_; }

private:
    void refit();

    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
    double ridge_;
    int k_neighbors_;
    double fallback_spread_;
    Eigen::MatrixXd distances_;
    std::vector<Eigen::Index> selected_;
    std::vector<bool> used_;
    RbfNetwork network_;
    Eigen::MatrixXd basis_;  // orthonormal basis of [bias, selected columns]
    Eigen::VectorXd residual_;
    double training_mse_ = 0.0;
};

}  // namespace effortnn
