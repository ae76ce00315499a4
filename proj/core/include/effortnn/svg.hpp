#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effortnn/dataset.hpp"
#include "effortnn/experiment.hpp"

namespace effortnn {

/// Size (x) against effort (y), one `circle.point` per project.
std::string scatter_svg(std::string_view title, std::span<const ProjectRecord> records);

struct IntervalGroup {
    std::string model;
    double mean = 0.0;        // mean absolute residual
    double half_width = 0.0;  // 1.96 * sd / sqrt(n), sample sd
    std::size_t n = 0;
};

/// Mean and 95% normal interval of a vector of absolute residuals.
IntervalGroup interval_of(std::string model, std::span<const double> abs_residuals);

/// One group per successfully trained model on `dataset`, report column order.
std::vector<IntervalGroup> interval_groups(const BenchmarkReport& report, std::string_view dataset);

/// One `g.whisker` per group carrying data-model, data-mean and
/// data-half-width attributes, plus a legend stating the interval convention.
std::string interval_svg(std::string_view title, std::span<const IntervalGroup> groups);

}  // namespace effortnn
