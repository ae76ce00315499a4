#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace effortnn {

struct ScgConfig {
    /// Stop when an accepted step moves no weight by more than this and the
    /// loss changes by less than this.
    double convergence_tolerance = 1.0e-5;
    int max_iterations = 10000;
    /// Stop when the Euclidean gradient norm falls below this.
    double min_gradient = 1.0e-6;
    /// Stop when an accepted step lowers the loss by less than this
    /// (absolute, not relative).
    double min_improvement_delta = 1.0e-6;

    void validate() const;
};

enum class StopReason { tolerance, max_iterations, min_gradient, min_improvement };

std::string_view to_string(StopReason reason);

/// Returns the loss at `w` and writes the gradient into `grad` (already sized).
using Objective = std::function<double(const Eigen::VectorXd& w, Eigen::VectorXd& grad)>;

struct ScgResult {
    Eigen::VectorXd minimizer;
    double loss = 0.0;
    /// Loss at the start point followed by the loss after every accepted step.
    std::vector<double> trace;
    StopReason stop_reason = StopReason::max_iterations;
    int iterations = 0;
};

/// Scaled conjugate gradient (Moller 1993) with the Netlab-style lambda
/// schedule: sigma0 = 1e-4, lambda0 = 1e-6, lambda in [1e-15, 1e100].
///
/// A trial point with non-finite loss is treated as a failed step. A
/// non-finite gradient at an accepted point, or anything non-finite at `w0`,
/// throws NumericalError carrying the last finite iterate.
ScgResult scg_minimize(const Objective& objective, Eigen::VectorXd w0,
                       const ScgConfig& config = {});

}  // namespace effortnn
