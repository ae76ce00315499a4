#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "effortnn/estimators.hpp"

namespace effortnn {

/// Lossless JSON form of a trained model: kind, encoding schema, target
/// scaler, network weights, growth trace, seed and library version.
nlohmann::json model_to_json(const EstimatorModel& model);

/// Throws ConfigError on a malformed document.
EstimatorModel model_from_json(const nlohmann::json& j);

void save_model(const EstimatorModel& model, const std::filesystem::path& path);
EstimatorModel load_model(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const ScgConfig& c);
/// Missing keys keep their defaults; unknown keys throw ConfigError.
void from_json(const nlohmann::json& j, ScgConfig& c);
void to_json(nlohmann::json& j, const EstimatorConfig& c);
void from_json(const nlohmann::json& j, EstimatorConfig& c);

nlohmann::json schema_to_json(const EncodingSchema& schema);
EncodingSchema schema_from_json(const nlohmann::json& j);

}  // namespace effortnn
