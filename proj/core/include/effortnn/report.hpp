#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "effortnn/experiment.hpp"

namespace effortnn {

nlohmann::json report_to_json(const BenchmarkReport& report);

/// Inverse of report_to_json. Throws ConfigError on a malformed document.
BenchmarkReport report_from_json(const nlohmann::json& j);

/// Copy of a serialized report with wall-clock and timestamp fields removed,
/// for comparing two runs.
nlohmann::json without_timing(nlohmann::json report);

/// MAR and MR tables (datasets as rows, models as columns), bias verdicts,
/// the best model per dataset, input significance ranks and, when at least
/// two network kinds were run, the signed-rank p-value table.
std::string render_markdown(const BenchmarkReport& report);

/// Signed-rank table alone; empty when the report holds no pairwise tests.
std::string render_wilcoxon_table(const BenchmarkReport& report);

/// "AFP", "DP", "LT", "RL" for the four standard inputs, else the field name.
std::string field_abbreviation(std::string_view field);

}  // namespace effortnn
