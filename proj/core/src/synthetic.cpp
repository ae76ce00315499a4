#include "effortnn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "effortnn/error.hpp"
#include "effortnn/random.hpp"

namespace effortnn {

void SyntheticSpec::validate() const {
    if (band_weights.size() != band_edges.size()) {
        throw ConfigError("synthetic spec: band_weights and band_edges must have equal length");
    }
    double sum = 0.0;
    for (double w : band_weights) {
        if (!(w >= 0.0)) throw ConfigError("synthetic spec: band weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("synthetic spec: band weights must sum to 1");
    for (std::size_t i = 1; i < band_edges.size(); ++i) {
        if (!(band_edges[i] > band_edges[i - 1])) throw ConfigError("synthetic spec: band edges must ascend");
    }
    if (!(open_band_upper > band_edges.back())) {
        throw ConfigError("synthetic spec: open_band_upper must exceed the last edge");
    }
    if (!(size_median > 0.0) || !(size_dispersion > 0.0) || !(noise_dispersion >= 0.0)) {
        throw ConfigError("synthetic spec: size median and dispersions must be positive");
    }
    if (year_max < year_min) throw ConfigError("synthetic spec: year range is inverted");
    if (platforms.empty() || language_types.empty() || resource_levels.empty()) {
        throw ConfigError("synthetic spec: category vocabularies must be nonempty");
    }
}

std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights) {
    std::vector<std::size_t> counts(weights.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = weights[i] * static_cast<double>(total);
        counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        assigned += counts[i];
        remainders.emplace_back(exact - static_cast<double>(counts[i]), i);
    }
    // Largest remainder first; ties go to the lower band index.
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned) {
        ++counts[remainders[k].second];
    }
    return counts;
}

std::vector<ProjectRecord> generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    RandomSource rng(spec.seed);
    const auto counts = apportion(spec.n_projects, spec.band_weights);

    std::vector<std::size_t> band_of;
    for (std::size_t b = 0; b < counts.size(); ++b) band_of.insert(band_of.end(), counts[b], b);
    rng.shuffle(std::span<std::size_t>(band_of));

    const double log_median = std::log(spec.size_median);
    std::vector<ProjectRecord> out;
    out.reserve(spec.n_projects);
    for (std::size_t i = 0; i < band_of.size(); ++i) {
        const std::size_t b = band_of[i];
        ProjectRecord r;
        char id[32];
        std::snprintf(id, sizeof id, "SYN-%05zu", i + 1);
        r.project_id = id;
        r.data_quality = "A";
        r.count_approach = "IFPUG";
        r.development_type = "New Development";

        const auto pick = [&](const std::vector<std::string>& vocab, double& position) {
            const auto k = rng.below(vocab.size());
            position += (static_cast<double>(k) + 0.5) / static_cast<double>(vocab.size());
            return vocab[k];
        };
        double position = 0.0;
        r.development_platform = pick(spec.platforms, position);
        r.language_type = pick(spec.language_types, position);
        r.resource_level = pick(spec.resource_levels, position);
        position /= 3.0;

        r.project_year = spec.year_min + static_cast<int>(rng.below(
                                             static_cast<std::uint64_t>(spec.year_max - spec.year_min + 1)));
        r.afp = std::max(1.0, std::round(std::exp(log_median + spec.size_dispersion * rng.normal())));

        const double lo = b == 0 ? std::max(spec.band_edges[0], spec.min_productivity) : spec.band_edges[b];
        const double hi = b + 1 < spec.band_edges.size() ? spec.band_edges[b + 1] : spec.open_band_upper;
        // u lies strictly inside (0, 1), so productivity stays inside [lo, hi).
        const double u = 0.5 * rng.uniform() + 0.5 * position;
        const double productivity = lo + (hi - lo) * u;
        const double noise = spec.noise_dispersion > 0.0 ? std::exp(spec.noise_dispersion * rng.normal()) : 1.0;
        r.normalised_effort = productivity * *r.afp * noise;
        out.push_back(std::move(r));
    }
    return out;
}

void to_json(nlohmann::json& j, const SyntheticSpec& s) {
    j = nlohmann::json{{"n_projects", s.n_projects},
                       {"band_weights", s.band_weights},
                       {"band_edges", s.band_edges},
                       {"open_band_upper", s.open_band_upper},
                       {"min_productivity", s.min_productivity},
                       {"size_median", s.size_median},
                       {"size_dispersion", s.size_dispersion},
                       {"noise_dispersion", s.noise_dispersion},
                       {"year_min", s.year_min},
                       {"year_max", s.year_max},
                       {"platforms", s.platforms},
                       {"language_types", s.language_types},
                       {"resource_levels", s.resource_levels},
                       {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SyntheticSpec& s) {
    const SyntheticSpec defaults;
    s.n_projects = j.value("n_projects", defaults.n_projects);
    s.band_weights = j.value("band_weights", defaults.band_weights);
    s.band_edges = j.value("band_edges", defaults.band_edges);
    s.open_band_upper = j.value("open_band_upper", defaults.open_band_upper);
    s.min_productivity = j.value("min_productivity", defaults.min_productivity);
    s.size_median = j.value("size_median", defaults.size_median);
    s.size_dispersion = j.value("size_dispersion", defaults.size_dispersion);
    s.noise_dispersion = j.value("noise_dispersion", defaults.noise_dispersion);
    s.year_min = j.value("year_min", defaults.year_min);
    s.year_max = j.value("year_max", defaults.year_max);
    s.platforms = j.value("platforms", defaults.platforms);
    s.language_types = j.value("language_types", defaults.language_types);
    s.resource_levels = j.value("resource_levels", defaults.resource_levels);
    s.seed = j.value("seed", defaults.seed);
}

}  // namespace effortnn
