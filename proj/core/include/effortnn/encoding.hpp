#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "effortnn/dataset.hpp"

namespace effortnn {

enum class ColumnKind { continuous, one_hot };

struct ColumnSpec {
    std::string field;
    ColumnKind kind = ColumnKind::continuous;
    std::string category;  // empty for the continuous size column
    bool operator==(const ColumnSpec&) const = default;
};

struct Scaler {
    double center = 0.0;
    double scale = 1.0;
    double apply(double x) const { return (x - center) / scale; }
    double invert(double z) const { return center + scale * z; }
    bool operator==(const Scaler&) const = default;
};

struct CategoryVocabulary {
    std::string field;
    std::vector<std::string> categories;  // sorted
    bool operator==(const CategoryVocabulary&) const = default;
};

/// Feature layout: standardized size first, then one one-hot block per
/// categorical field. Fitted on training records only.
struct EncodingSchema {
    Scaler size_scaler;
    std::vector<CategoryVocabulary> vocabularies;

    Eigen::Index width() const;
    std::vector<ColumnSpec> columns() const;
    /// Input field names in column order: "afp", then the categorical fields.
    std::vector<std::string> fields() const;

    struct Block {
        std::string field;
        Eigen::Index start = 0;
        Eigen::Index width = 0;
    };
    std::vector<Block> blocks() const;

    /// Unseen categories encode as an all-zero block and append a warning.
    Eigen::VectorXd encode(const ProjectRecord& record, std::vector<std::string>* warnings = nullptr) const;

    struct Decoded {
        double afp = 0.0;
        std::vector<std::pair<std::string, std::optional<std::string>>> categories;
    };
    /// Inverse of encode. An all-zero block decodes to nullopt.
    Decoded decode(std::span<const double> row) const;

    bool operator==(const EncodingSchema&) const = default;
};

/// Standardizes size with the sample mean and standard deviation of
/// `train`; a zero spread falls back to scale 1 with a warning.
EncodingSchema fit_encoding(std::span<const ProjectRecord> train, std::vector<std::string>* warnings = nullptr);

struct DesignMatrix {
    Eigen::MatrixXd features;  // n x d
    Eigen::VectorXd targets;   // person-hours
    EncodingSchema schema;
    std::vector<std::string> project_ids;

    Eigen::Index rows() const { return features.rows(); }
    std::vector<ColumnSpec> column_schema() const { return schema.columns(); }
};

DesignMatrix encode_records(const EncodingSchema& schema, std::span<const ProjectRecord> records,
                            std::vector<std::string>* warnings = nullptr);

struct EncodedSplit {
    DesignMatrix train;
    DesignMatrix test;
    std::vector<std::string> warnings;
};

/// Throws TooSmallError when either side of the split is empty.
EncodedSplit encode_features(const Split& split);

}  // namespace effortnn
