#include "effortnn/mlp.hpp"

#include <cmath>

#include "effortnn/error.hpp"
#include "effortnn/numeric.hpp"

namespace effortnn {

Eigen::VectorXd MlpNetwork::pack() const {
    const Eigen::Index h = hidden_count(), d = input_dim();
    Eigen::VectorXd p(parameter_count(h, d));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < h; ++j)
        for (Eigen::Index i = 0; i < d; ++i) p[k++] = hidden_weights(j, i);
    for (Eigen::Index j = 0; j < h; ++j) p[k++] = hidden_bias[j];
    for (Eigen::Index j = 0; j < h; ++j) p[k++] = output_weights[j];
    p[k] = output_bias;
    return p;
}

MlpNetwork MlpNetwork::unpack(const Eigen::VectorXd& p, Eigen::Index h, Eigen::Index d) {
    if (p.size() != parameter_count(h, d)) throw DomainError("MlpNetwork::unpack: parameter count mismatch");
    MlpNetwork net;
    net.hidden_weights.resize(h, d);
    net.hidden_bias.resize(h);
    net.output_weights.resize(h);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < h; ++j)
        for (Eigen::Index i = 0; i < d; ++i) net.hidden_weights(j, i) = p[k++];
    for (Eigen::Index j = 0; j < h; ++j) net.hidden_bias[j] = p[k++];
    for (Eigen::Index j = 0; j < h; ++j) net.output_weights[j] = p[k++];
    net.output_bias = p[k];
    return net;
}

Eigen::VectorXd MlpNetwork::forward(const Eigen::MatrixXd& x) const {
    if (x.cols() != input_dim()) throw DomainError("MlpNetwork::forward: feature dimension mismatch");
    Eigen::MatrixXd z = x * hidden_weights.transpose();
    z.rowwise() -= hidden_bias.transpose();
    const Eigen::MatrixXd hidden = z.array().tanh().matrix();
    return (hidden * output_weights).array() + output_bias;
}

double mlp_loss(const Eigen::VectorXd& params, Eigen::Index h, const Eigen::MatrixXd& x,
                const Eigen::VectorXd& y, Eigen::VectorXd* grad) {
    const Eigen::Index n = x.rows(), d = x.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    // Views into the packed vector; W is stored row-major.
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(params.data(), h, d);
    const auto b = params.segment(h * d, h);
    const auto v = params.segment(h * d + h, h);
    const double c = params[h * (d + 2)];

    Eigen::MatrixXd z = x * w.transpose();
    z.rowwise() -= b.transpose();
    const Eigen::MatrixXd hidden = z.array().tanh().matrix();
    const Eigen::VectorXd residual = ((hidden * v).array() + c).matrix() - y;
    const double loss = residual.squaredNorm() * inv_n;

    if (grad) {
        grad->resize(params.size());
        const Eigen::VectorXd dout = (2.0 * inv_n) * residual;
        Eigen::MatrixXd dz = (dout * v.transpose()).array() * (1.0 - hidden.array().square());
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gw(grad->data(), h, d);
        gw = dz.transpose() * x;
        grad->segment(h * d, h) = -dz.colwise().sum().transpose();
        grad->segment(h * d + h, h) = hidden.transpose() * dout;
        (*grad)[h * (d + 2)] = dout.sum();
    }
    return loss;
}

MlpNetwork initial_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::Index h,
                       RandomSource& rng, double ridge) {
    const Eigen::Index d = x.cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(d, 1)));
    MlpNetwork net;
    net.hidden_weights.resize(h, d);
    net.hidden_bias.resize(h);
    for (Eigen::Index j = 0; j < h; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) net.hidden_weights(j, i) = rng.uniform(-0.5, 0.5) * scale;
        net.hidden_bias[j] = rng.uniform(-0.5, 0.5) * scale;
    }
    Eigen::MatrixXd z = x * net.hidden_weights.transpose();
    z.rowwise() -= net.hidden_bias.transpose();
    Eigen::MatrixXd design(x.rows(), h + 1);
    design.leftCols(h) = z.array().tanh().matrix();
    design.col(h).setOnes();
    const auto solved = ridge_least_squares(design, y, ridge, 1);
    net.output_weights = solved.coefficients.head(h);
    net.output_bias = solved.coefficients[h];
    return net;
}

MlpFit fit_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::Index h, const ScgConfig& scg,
               RandomSource& rng, double ridge) {
    if (h < 1) throw DomainError("fit_mlp: at least one hidden neuron is required");
    const MlpNetwork start = initial_mlp(x, y, h, rng, ridge);
    const Objective objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
        return mlp_loss(p, h, x, y, &g);
    };
    MlpFit fit;
    fit.optimizer = scg_minimize(objective, start.pack(), scg);
    fit.network = MlpNetwork::unpack(fit.optimizer.minimizer, h, x.cols());
    return fit;
}

}  // namespace effortnn
