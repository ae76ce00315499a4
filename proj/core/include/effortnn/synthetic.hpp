#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "effortnn/dataset.hpp"

namespace effortnn {

/// Parameters for generating ISBSG-shaped substitute data.
///
/// Each project is assigned a productivity band by largest-remainder
/// apportionment of `band_weights`. Its productivity is drawn inside that
/// band, shifted by its categorical values so that the categorical inputs
/// carry some signal. Size is log-normal; effort = productivity * size *
/// exp(N(0, noise_dispersion)), so a positive noise may move a project
/// across a band edge.
struct SyntheticSpec {
    std::size_t n_projects = 300;
    std::vector<double> band_weights{0.30, 0.27, 0.15, 0.10, 0.18};
    std::vector<double> band_edges{0.0, 5.0, 10.0, 15.0, 20.0};
    double open_band_upper = 40.0;    // sampling cap for the last band
    double min_productivity = 0.5;    // sampling floor for the first band
    double size_median = 250.0;       // afp
    double size_dispersion = 0.9;     // sd of log(afp)
    double noise_dispersion = 0.0;
    int year_min = 1990;
    int year_max = 2008;
    std::vector<std::string> platforms{"MF", "MR", "Multi", "PC"};
    std::vector<std::string> language_types{"3GL", "4GL", "ApG"};
    std::vector<std::string> resource_levels{"1", "2", "3", "4"};
    std::uint64_t seed = 42;

    void validate() const;
};

/// Largest-remainder rounding of weights * total; counts sum to total.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights);

std::vector<ProjectRecord> generate_synthetic(const SyntheticSpec& spec);

void to_json(nlohmann::json& j, const SyntheticSpec& spec);
void from_json(const nlohmann::json& j, SyntheticSpec& spec);

}  // namespace effortnn
