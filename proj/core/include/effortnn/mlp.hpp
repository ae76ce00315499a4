#pragma once

#include <Eigen/Core>

#include "effortnn/random.hpp"
#include "effortnn/scg.hpp"

namespace effortnn {

/// One tanh hidden layer, identity output. Hidden unit j computes
/// tanh(w_j . x - b_j); the output is v . h + c.
struct MlpNetwork {
    Eigen::MatrixXd hidden_weights;  // h x d
    Eigen::VectorXd hidden_bias;     // h
    Eigen::VectorXd output_weights;  // h
    double output_bias = 0.0;

    Eigen::Index hidden_count() const { return hidden_weights.rows(); }
    Eigen::Index input_dim() const { return hidden_weights.cols(); }

    /// Parameter layout: W row-major, then b, then v, then c.
    Eigen::VectorXd pack() const;
    static MlpNetwork unpack(const Eigen::VectorXd& params, Eigen::Index hidden, Eigen::Index inputs);
    static Eigen::Index parameter_count(Eigen::Index hidden, Eigen::Index inputs) {
        return hidden * (inputs + 2) + 1;
    }

    Eigen::VectorXd forward(const Eigen::MatrixXd& x) const;
};

/// Mean squared error of the packed network on (x, y); fills `grad` by
/// backpropagation when non-null.
double mlp_loss(const Eigen::VectorXd& params, Eigen::Index hidden, const Eigen::MatrixXd& x,
                const Eigen::VectorXd& y, Eigen::VectorXd* grad);

/// Hidden weights uniform in [-0.5, 0.5] / sqrt(fan-in); the output layer
/// starts at the ridge least-squares fit to those random hidden units.
MlpNetwork initial_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::Index hidden,
                       RandomSource& rng, double ridge);

struct MlpFit {
    MlpNetwork network;
    ScgResult optimizer;
};

MlpFit fit_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::Index hidden,
               const ScgConfig& scg, RandomSource& rng, double ridge);

}  // namespace effortnn
