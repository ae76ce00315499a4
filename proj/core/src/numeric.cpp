#include "effortnn/numeric.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "effortnn/error.hpp"

namespace effortnn {

std::string_view to_string(Activation kind) {
    switch (kind) {
        case Activation::identity: return "identity";
        case Activation::tanh: return "tanh";
        case Activation::logistic: return "logistic";
        case Activation::gaussian: return "gaussian";
    }
    return "unknown";
}

double activate(Activation kind, double x) {
    switch (kind) {
        case Activation::identity: return x;
        case Activation::tanh: return std::tanh(x);
        case Activation::logistic: return 1.0 / (1.0 + std::exp(-x));
        case Activation::gaussian: return std::exp(-0.5 * x * x);
    }
    return x;
}

double activate_derivative(Activation kind, double x) {
    switch (kind) {
        case Activation::identity: return 1.0;
        case Activation::tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::logistic: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
        case Activation::gaussian: return -x * std::exp(-0.5 * x * x);
    }
    return 1.0;
}

double neuron_output(std::span<const double> inputs, std::span<const double> weights,
                     double bias, Activation kind) {
    if (inputs.size() != weights.size()) {
        throw DomainError("neuron_output: " + std::to_string(inputs.size()) + " inputs but " +
                          std::to_string(weights.size()) + " weights");
    }
    double net = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) net += weights[i] * inputs[i];
    return activate(kind, net - bias);
}

double rbf_kernel(std::span<const double> x, std::span<const double> center, double spread) {
    if (!(spread > 0.0)) throw DomainError("rbf_kernel: spread must be positive");
    if (x.size() != center.size()) {
        throw DomainError("rbf_kernel: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                          std::to_string(center.size()) + ")");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - center[i];
        sq += diff * diff;
    }
    return std::exp(-sq / (2.0 * spread * spread));
}

Eigen::VectorXd finite_diff_gradient(const LossFunction& loss, const Eigen::VectorXd& w,
                                     std::optional<double> step) {
    if (step && !(*step > 0.0)) throw DomainError("finite_diff_gradient: step must be positive");
    Eigen::VectorXd grad(w.size());
    Eigen::VectorXd probe = w;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double h = step ? *step : 1e-6 * (1.0 + std::abs(w[i]));
        probe[i] = w[i] + h;
        const double up = loss(probe);
        probe[i] = w[i] - h;
        const double down = loss(probe);
        probe[i] = w[i];
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw NumericalError("finite_diff_gradient: non-finite loss at coordinate " +
                                     std::to_string(i),
                                 w);
        }
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

RidgeSolution ridge_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                  double ridge, Eigen::Index unpenalized_trailing) {
    const Eigen::Index n = design.rows();
    const Eigen::Index p = design.cols();
    if (target.size() != n) throw DomainError("ridge_least_squares: row count mismatch");
    if (unpenalized_trailing < 0 || unpenalized_trailing > p) {
        throw DomainError("ridge_least_squares: bad unpenalized column count");
    }
    const Eigen::Index penalized = p - unpenalized_trailing;
    constexpr double kMaxRidge = 1e-2;

    double lambda = ridge;
    for (;;) {
        Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(n + penalized, p);
        augmented.topRows(n) = design;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + penalized);
        rhs.head(n) = target;
        const double root = std::sqrt(std::max(lambda, 0.0));
        for (Eigen::Index j = 0; j < penalized; ++j) augmented(n + j, j) = root;

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(augmented);
        if (qr.rank() == p) {
            Eigen::VectorXd c = qr.solve(rhs);
            if (c.allFinite()) return {std::move(c), lambda};
        }
        lambda = lambda > 0.0 ? lambda * 10.0 : 1e-10;
        if (lambda > kMaxRidge * (1.0 + 1e-12)) {
            throw TrainingError("singular output-layer system: ridge escalated past 1e-2");
        }
    }
}

double mean_of(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace effortnn
