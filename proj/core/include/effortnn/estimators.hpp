#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "effortnn/ccnn.hpp"
#include "effortnn/encoding.hpp"
#include "effortnn/grnn.hpp"
#include "effortnn/mlp.hpp"
#include "effortnn/rbf.hpp"
#include "effortnn/scg.hpp"

namespace effortnn {

enum class ModelKind { mlp, rbfnn, grnn, ccnn };

inline constexpr std::array<ModelKind, 4> kAllModelKinds = {ModelKind::mlp, ModelKind::grnn, ModelKind::rbfnn,
                                                           ModelKind::ccnn};

/// "MLP", "RBFNN", "GRNN", "CCNN".
std::string_view to_string(ModelKind kind);
/// Case-insensitive; throws ConfigError for anything else.
ModelKind model_kind_from_string(std::string_view name);

struct SpreadGrid {
    double lower = 0.05;
    double upper = 5.0;
    int steps = 25;
    int sweeps = 2;
};

struct EstimatorConfig {
    ModelKind kind = ModelKind::mlp;
    int max_hidden = 30;
    int cv_folds = 10;
    /// When false, MLP/RBFNN/CCNN grow to max_hidden (or until the training
    /// residual stops improving) without consulting cross-validation.
    bool select_by_validation = true;
    ScgConfig scg;
    SpreadGrid spread_search;
    std::uint64_t seed = 0;  // fold assignment and weight initialization
    double ridge = 1e-8;
    int candidate_pool = 8;
    int rbf_neighbors = 5;

    void validate() const;
    static EstimatorConfig defaults(ModelKind kind);
};

/// One row of the growth trace: errors after settling on `hidden` units
/// (MSE on standardized targets; GRNN records MAR in person-hours).
struct GrowthStep {
    int hidden = 0;
    double training_error = 0.0;
    std::optional<double> validation_error;
};

using Network = std::variant<MlpNetwork, RbfNetwork, GrnnModel, CascadeNetwork>;

/// A trained regressor. Immutable in practice; predictions depend only on
/// these fields.
struct EstimatorModel {
    ModelKind kind = ModelKind::mlp;
    EncodingSchema schema;
    Scaler target_scaler;  // networks predict standardized effort
    Network network;
    std::vector<GrowthStep> trace;
    std::vector<double> field_spreads;  // GRNN only, in schema.fields() order
    std::uint64_t seed = 0;

    int hidden_count() const;
    Eigen::Index input_dim() const { return schema.width(); }
};

EstimatorModel train_mlp(const DesignMatrix& train, const EstimatorConfig& config);
EstimatorModel train_rbfnn(const DesignMatrix& train, const EstimatorConfig& config);
EstimatorModel train_grnn(const DesignMatrix& train, const EstimatorConfig& config);
EstimatorModel train_ccnn(const DesignMatrix& train, const EstimatorConfig& config);

/// Dispatches on config.kind.
EstimatorModel train(const DesignMatrix& train, const EstimatorConfig& config);

/// GRNN over `train` with the given per-field spreads, no search.
EstimatorModel make_grnn(const DesignMatrix& train, const std::vector<double>& field_spreads);

struct Prediction {
    double effort = 0.0;  // person-hours, >= 0
    bool clamped = false;
    bool nearest_neighbor_fallback = false;
};

/// Throws DomainError when the feature width differs from the model's schema.
Prediction predict(const EstimatorModel& model, std::span<const double> features);
std::vector<Prediction> predict(const EstimatorModel& model, const Eigen::MatrixXd& features);
Eigen::VectorXd predicted_effort(std::span<const Prediction> predictions);

/// Network output in person-hours before the non-negativity clamp.
Eigen::VectorXd raw_predictions(const EstimatorModel& model, const Eigen::MatrixXd& features);

struct FieldImportance {
    std::string field;
    double score = 0.0;
    int rank = 0;
};
using SignificanceRanking = std::vector<FieldImportance>;

/// Mean increase in MAR when one input field's columns are permuted jointly
/// across rows, averaged over `repeats` permutations. Ranked by descending
/// score, ties by field name.
SignificanceRanking permutation_importance(const EstimatorModel& model, const DesignMatrix& data, int repeats = 20,
                                           std::uint64_t seed = 0);

/// Assigns ranks 1..k by descending score, ties broken alphabetically.
SignificanceRanking rank_importances(std::vector<FieldImportance> scores);

}  // namespace effortnn
