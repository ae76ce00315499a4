#include "effortnn/ccnn.hpp"

#include <cmath>

#include "effortnn/error.hpp"
#include "effortnn/numeric.hpp"

namespace effortnn {

Eigen::MatrixXd CascadeNetwork::cascade_inputs(const Eigen::MatrixXd& x) const {
    const Eigen::Index d = x.cols(), k = hidden_count();
    if (output_weights.size() != 0 && output_weights.size() != d + k) {
        throw DomainError("CascadeNetwork: feature dimension mismatch");
    }
    Eigen::MatrixXd a(x.rows(), d + k);
    a.leftCols(d) = x;
    for (Eigen::Index u = 0; u < k; ++u) {
        const auto& unit = hidden[static_cast<std::size_t>(u)];
        a.col(d + u) = ((a.leftCols(d + u) * unit.weights).array() - unit.bias).tanh().matrix();
    }
    return a;
}

Eigen::VectorXd CascadeNetwork::forward(const Eigen::MatrixXd& x) const {
    return (cascade_inputs(x) * output_weights).array() + output_bias;
}

double candidate_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& inputs,
                           const Eigen::VectorXd& e, Eigen::VectorXd* grad) {
    const Eigen::Index n = inputs.rows(), q = inputs.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    const auto w = params.head(q);
    const double b = params[q];

    const Eigen::VectorXd v = ((inputs * w).array() - b).tanh().matrix();
    const Eigen::VectorXd vc = v.array() - v.mean();
    const double cov = vc.dot(e) * inv_n;
    const double var_v = vc.squaredNorm() * inv_n + 1e-12;
    const double var_e = e.squaredNorm() * inv_n + 1e-12;
    const double objective = -(cov * cov) / (var_v * var_e);

    if (grad) {
        // d/dv_p of -cov^2 / (var_v var_e); e is centered so d cov/dv_p = e_p / n.
        const Eigen::VectorXd dv = -(2.0 * cov * inv_n * e * var_v - cov * cov * 2.0 * inv_n * vc) /
                                   (var_v * var_v * var_e);
        const Eigen::VectorXd dz = dv.array() * (1.0 - v.array().square());
        grad->resize(q + 1);
        grad->head(q) = inputs.transpose() * dz;
        (*grad)[q] = -dz.sum();
    }
    return objective;
}

CascadeGrower::CascadeGrower(Eigen::MatrixXd x, Eigen::VectorXd y, CascadeOptions options, RandomSource rng)
    : x_(std::move(x)), y_(std::move(y)), options_(std::move(options)), rng_(std::move(rng)) {
    if (x_.rows() == 0) throw DomainError("CascadeGrower: empty training set");
    inputs_ = x_;
    solve_output(network_, inputs_);
    training_mse_ = (network_.forward(x_) - y_).squaredNorm() / static_cast<double>(x_.rows());
}

void CascadeGrower::solve_output(CascadeNetwork& net, const Eigen::MatrixXd& inputs) const {
    Eigen::MatrixXd design(inputs.rows(), inputs.cols() + 1);
    design.leftCols(inputs.cols()) = inputs;
    design.col(inputs.cols()).setOnes();
    const auto solved = ridge_least_squares(design, y_, options_.ridge, 1);
    net.output_weights = solved.coefficients.head(inputs.cols());
    net.output_bias = solved.coefficients[inputs.cols()];
}

bool CascadeGrower::install_next() {
    if (finished_) return false;
    const Eigen::Index n = inputs_.rows(), q = inputs_.cols();
    const Eigen::VectorXd residual = y_ - network_.forward(x_);
    const Eigen::VectorXd centered = residual.array() - residual.mean();

    const Objective objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
        return candidate_objective(p, inputs_, centered, &g);
    };
    const double scale = 1.0 / std::sqrt(static_cast<double>(q));

    double best_score = -1.0;
    Eigen::VectorXd best;
    for (int c = 0; c < options_.candidate_pool; ++c) {
        Eigen::VectorXd start(q + 1);
        for (Eigen::Index i = 0; i <= q; ++i) start[i] = rng_.uniform(-0.5, 0.5) * scale;
        try {
            const auto fit = scg_minimize(objective, start, options_.scg);
            const double score = -fit.loss;
            if (std::isfinite(score) && score > best_score) {
                best_score = score;
                best = fit.minimizer;
            }
        } catch (const NumericalError&) {
            // diverged; discard this candidate
        }
    }
    if (best.size() == 0) {
        finished_ = true;
        return false;
    }

    CascadeNetwork grown = network_;
    grown.hidden.push_back({best.head(q), best[q]});
    Eigen::MatrixXd grown_inputs(n, q + 1);
    grown_inputs.leftCols(q) = inputs_;
    grown_inputs.col(q) = ((inputs_ * best.head(q)).array() - best[q]).tanh().matrix();
    solve_output(grown, grown_inputs);
    const Eigen::VectorXd fitted = (grown_inputs * grown.output_weights).array() + grown.output_bias;
    const double mse = (fitted - y_).squaredNorm() / static_cast<double>(n);

    if (!(training_mse_ - mse > options_.min_improvement)) {
        finished_ = true;
        return false;
    }
    network_ = std::move(grown);
    inputs_ = std::move(grown_inputs);
    training_mse_ = mse;
    return true;
}

}  // namespace effortnn
