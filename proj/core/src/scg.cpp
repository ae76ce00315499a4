#include "effortnn/scg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "effortnn/error.hpp"

namespace effortnn {

void ScgConfig::validate() const {
    if (!(convergence_tolerance > 0.0) || max_iterations <= 0 || !(min_gradient > 0.0) ||
        !(min_improvement_delta > 0.0)) {
        throw ConfigError("ScgConfig: all thresholds must be positive");
    }
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::tolerance: return "tolerance";
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::min_gradient: return "min_gradient";
        case StopReason::min_improvement: return "min_improvement";
    }
    return "unknown";
}

ScgResult scg_minimize(const Objective& objective, Eigen::VectorXd w0, const ScgConfig& config) {
    config.validate();

    constexpr double kSigma0 = 1.0e-4;
    constexpr double kLambdaMin = 1.0e-15;
    constexpr double kLambdaMax = 1.0e100;
    const double eps = std::numeric_limits<double>::epsilon();

    const Eigen::Index p = w0.size();
    ScgResult result;
    Eigen::VectorXd w = std::move(w0);
    Eigen::VectorXd grad(p);
    double loss = objective(w, grad);
    if (!std::isfinite(loss) || !grad.allFinite()) {
        throw NumericalError("scg_minimize: non-finite loss or gradient at the start point", w);
    }
    result.trace.push_back(loss);

    auto finish = [&](StopReason reason, int iterations) {
        result.minimizer = w;
        result.loss = loss;
        result.stop_reason = reason;
        result.iterations = iterations;
        return result;
    };

    if (grad.norm() < config.min_gradient) return finish(StopReason::min_gradient, 0);

    Eigen::VectorXd direction = -grad;
    Eigen::VectorXd grad_old(p), grad_plus(p), grad_new(p), w_new(p);
    double lambda = 1.0e-6;
    double mu = 0.0, kappa = 0.0, theta = 0.0;
    bool success = true;
    Eigen::Index successes = 0;

    for (int it = 1; it <= config.max_iterations; ++it) {
        if (success) {
            mu = direction.dot(grad);
            if (mu >= 0.0) {
                direction = -grad;
                mu = direction.dot(grad);
            }
            kappa = direction.squaredNorm();
            if (kappa < eps * eps) return finish(StopReason::min_gradient, it);
            const double sigma = kSigma0 / std::sqrt(kappa);
            objective(w + sigma * direction, grad_plus);
            if (!grad_plus.allFinite()) {
                throw NumericalError("scg_minimize: non-finite gradient during curvature probe", w);
            }
            theta = direction.dot(grad_plus - grad) / sigma;
        }

        double delta = theta + lambda * kappa;
        if (delta <= 0.0) {
            delta = lambda * kappa;
            lambda -= theta / kappa;
        }
        const double alpha = -mu / delta;
        w_new = w + alpha * direction;
        const double loss_new = objective(w_new, grad_new);

        const double comparison =
            std::isfinite(loss_new) ? 2.0 * (loss_new - loss) / (alpha * mu) : -1.0;
        if (comparison >= 0.0) {
            if (!grad_new.allFinite()) {
                throw NumericalError("scg_minimize: non-finite gradient at accepted point", w);
            }
            success = true;
            ++successes;
            const double max_step = (alpha * direction).cwiseAbs().maxCoeff();
            const double improvement = loss - loss_new;
            w.swap(w_new);
            loss = loss_new;
            grad_old.swap(grad);
            grad.swap(grad_new);
            result.trace.push_back(loss);

            if (max_step < config.convergence_tolerance &&
                std::abs(improvement) < config.convergence_tolerance) {
                return finish(StopReason::tolerance, it);
            }
            if (improvement < config.min_improvement_delta) {
                return finish(StopReason::min_improvement, it);
            }
            if (grad.norm() < config.min_gradient) return finish(StopReason::min_gradient, it);
        } else {
            success = false;
        }

        if (comparison < 0.25) {
            lambda = std::min(4.0 * lambda, kLambdaMax);
            // Step length has collapsed; no further progress is possible.
            if (lambda >= kLambdaMax) return finish(StopReason::min_improvement, it);
        }
        if (comparison > 0.75) lambda = std::max(0.5 * lambda, kLambdaMin);

        if (successes == p) {
            direction = -grad;
            successes = 0;
        } else if (success) {
            const double gamma = (grad_old - grad).dot(grad) / mu;
            direction = gamma * direction - grad;
        }
    }
    return finish(StopReason::max_iterations, config.max_iterations);
}

}  // namespace effortnn
