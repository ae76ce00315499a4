#pragma once

#include <vector>

#include <Eigen/Core>

#include "effortnn/random.hpp"
#include "effortnn/scg.hpp"

namespace effortnn {

/// A frozen hidden unit: tanh(w . [x, h_1..h_{k-1}] - bias).
struct CascadeUnit {
    Eigen::VectorXd weights;
    double bias = 0.0;
};

/// Inputs feed the output directly; each installed unit sees the inputs and
/// every earlier unit. Output = a . [x, h_1..h_k] + c.
struct CascadeNetwork {
    std::vector<CascadeUnit> hidden;
    Eigen::VectorXd output_weights;  // d + k
    double output_bias = 0.0;

    Eigen::Index hidden_count() const { return static_cast<Eigen::Index>(hidden.size()); }

    /// [x, h_1, ..., h_k]; n x (d + k).
    Eigen::MatrixXd cascade_inputs(const Eigen::MatrixXd& x) const;
    Eigen::VectorXd forward(const Eigen::MatrixXd& x) const;
};

/// Negative squared Pearson correlation between a candidate unit's output
/// tanh(A w - b) and the residual vector. `params` is [w, b]; `residual`
/// must already be centered. Fills `grad` when non-null.
double candidate_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& inputs,
                           const Eigen::VectorXd& centered_residual, Eigen::VectorXd* grad);

struct CascadeOptions {
    int candidate_pool = 8;
    double ridge = 1e-8;
    /// A new unit is installed only if it lowers training MSE by more than this.
    double min_improvement = 1e-6;
    ScgConfig scg;
};

/// Grows a cascade network one unit at a time on fixed training data.
class CascadeGrower {
public:
    CascadeGrower(Eigen::MatrixXd x, Eigen::VectorXd y, CascadeOptions options, RandomSource rng);

    /// Trains a candidate pool against the current residual, installs the
    /// best-correlated candidate, re-solves the output layer. Returns false,
    /// leaving the network unchanged, when no candidate survives or the
    /// training residual is not reduced; growth is then finished for good.
    bool install_next();

    bool finished() const { return finished_; }
    const CascadeNetwork& network() const { return network_; }
    double training_mse() const { return training_mse_; }

private:
    void solve_output(CascadeNetwork& net, const Eigen::MatrixXd& inputs) const;

    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
    CascadeOptions options_;
    RandomSource rng_;
    CascadeNetwork network_;
    Eigen::MatrixXd inputs_;  // cached cascade inputs for x_
    double training_mse_ = 0.0;
    bool finished_ = false;
};

}  // namespace effortnn
