#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Core>

namespace effortnn {

enum class Activation { identity, tanh, logistic, gaussian };

std::string_view to_string(Activation kind);

/// Value of the activation at `x`. The gaussian kind is exp(-x^2 / 2).
double activate(Activation kind, double x);
double activate_derivative(Activation kind, double x);

/// f(sum_i w_i x_i - bias). The bias enters with a minus sign, as the
/// threshold term of a classical neuron.
double neuron_output(std::span<const double> inputs, std::span<const double> weights,
                     double bias, Activation kind);

/// exp(-||x - c||^2 / (2 spread^2)) with the Euclidean norm.
double rbf_kernel(std::span<const double> x, std::span<const double> center, double spread);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

using LossFunction = std::function<double(const Eigen::VectorXd&)>;

/// Central differences. With no explicit step, coordinate i uses
/// h_i = 1e-6 * (1 + |w_i|).
Eigen::VectorXd finite_diff_gradient(const LossFunction& loss, const Eigen::VectorXd& w,
                                     std::optional<double> step = std::nullopt);

struct RidgeSolution {
    Eigen::VectorXd coefficients;
    double ridge_used = 0.0;
};

/// Minimizes ||A c - y||^2 + ridge * ||c_penalized||^2 where the last
/// `unpenalized_trailing` columns (bias terms) carry no penalty. Solved as an
/// augmented least-squares problem by column-pivoted QR. A rank-deficient
/// system retries with ridge x10 until 1e-2, then throws TrainingError.
RidgeSolution ridge_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                  double ridge, Eigen::Index unpenalized_trailing = 1);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> values);
double mean_of(std::span<const double> values);

}  // namespace effortnn
