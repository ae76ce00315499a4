#include "effortnn/encoding.hpp"

#include <algorithm>
#include <set>

#include "effortnn/error.hpp"
#include "effortnn/numeric.hpp"
#include "effortnn/table_io.hpp"

namespace effortnn {

Eigen::Index EncodingSchema::width() const {
    Eigen::Index d = 1;
    for (const auto& v : vocabularies) d += static_cast<Eigen::Index>(v.categories.size());
    return d;
}

std::vector<ColumnSpec> EncodingSchema::columns() const {
    std::vector<ColumnSpec> cols;
    cols.push_back({"afp", ColumnKind::continuous, {}});
    for (const auto& v : vocabularies) {
        for (const auto& c : v.categories) cols.push_back({v.field, ColumnKind::one_hot, c});
    }
    return cols;
}

std::vector<std::string> EncodingSchema::fields() const {
    std::vector<std::string> f{"afp"};
    for (const auto& v : vocabularies) f.push_back(v.field);
    return f;
}

std::vector<EncodingSchema::Block> EncodingSchema::blocks() const {
    std::vector<Block> out{{"afp", 0, 1}};
    Eigen::Index start = 1;
    for (const auto& v : vocabularies) {
        const auto w = static_cast<Eigen::Index>(v.categories.size());
        out.push_back({v.field, start, w});
        start += w;
    }
    return out;
}

Eigen::VectorXd EncodingSchema::encode(const ProjectRecord& record, std::vector<std::string>* warnings) const {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(width());
    if (!record.afp) throw DomainError("encode: project " + record.project_id + " has no size");
    row[0] = size_scaler.apply(*record.afp);
    Eigen::Index start = 1;
    for (const auto& v : vocabularies) {
        const std::string value = trim(field_text(record, v.field));
        const auto it = std::lower_bound(v.categories.begin(), v.categories.end(), value);
        if (it != v.categories.end() && *it == value) {
            row[start + (it - v.categories.begin())] = 1.0;
        } else if (warnings) {
            warnings->push_back("project " + record.project_id + ": " + v.field + " '" + value +
                                "' not seen in training data; encoded as all zeros");
        }
        start += static_cast<Eigen::Index>(v.categories.size());
    }
    return row;
}

EncodingSchema::Decoded EncodingSchema::decode(std::span<const double> row) const {
    if (static_cast<Eigen::Index>(row.size()) != width()) throw DomainError("decode: row width mismatch");
    Decoded out;
    out.afp = size_scaler.invert(row[0]);
    std::size_t start = 1;
    for (const auto& v : vocabularies) {
        std::optional<std::string> cat;
        for (std::size_t j = 0; j < v.categories.size(); ++j) {
            if (row[start + j] > 0.5) cat = v.categories[j];
        }
        out.categories.emplace_back(v.field, std::move(cat));
        start += v.categories.size();
    }
    return out;
}

EncodingSchema fit_encoding(std::span<const ProjectRecord> train, std::vector<std::string>* warnings) {
    EncodingSchema schema;
    std::vector<double> sizes;
    for (const auto& r : train) {
        if (!r.afp) throw DomainError("fit_encoding: project " + r.project_id + " has no size");
        sizes.push_back(*r.afp);
    }
    schema.size_scaler.center = mean_of(sizes);
    const double sd = sample_sd(sizes);
    if (sd > 0.0) {
        schema.size_scaler.scale = sd;
    } else {
        schema.size_scaler.scale = 1.0;
        if (warnings) warnings->push_back("training sizes have zero variance; size scale set to 1");
    }
    for (auto field : kCategoricalFields) {
        std::set<std::string> seen;
        for (const auto& r : train) seen.insert(trim(field_text(r, field)));
        schema.vocabularies.push_back({std::string(field), {seen.begin(), seen.end()}});
    }
    return schema;
}

DesignMatrix encode_records(const EncodingSchema& schema, std::span<const ProjectRecord> records,
                            std::vector<std::string>* warnings) {
    DesignMatrix m;
    m.schema = schema;
    const auto n = static_cast<Eigen::Index>(records.size());
    m.features.resize(n, schema.width());
    m.targets.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = records[static_cast<std::size_t>(i)];
        m.features.row(i) = schema.encode(r, warnings).transpose();
        if (!r.normalised_effort) throw DomainError("encode: project " + r.project_id + " has no effort");
        m.targets[i] = *r.normalised_effort;
        m.project_ids.push_back(r.project_id);
    }
    return m;
}

EncodedSplit encode_features(const Split& split) {
    if (split.train.empty() || split.test.empty()) {
        throw TooSmallError("encode_features: " + split.name + " needs records on both sides of the split");
    }
    EncodedSplit out;
    const EncodingSchema schema = fit_encoding(split.train, &out.warnings);
    out.train = encode_records(schema, split.train, &out.warnings);
    out.test = encode_records(schema, split.test, &out.warnings);
    return out;
}

}  // namespace effortnn
