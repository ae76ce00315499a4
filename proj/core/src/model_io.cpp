#include "effortnn/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "effortnn/error.hpp"
#include "effortnn/version.hpp"

namespace effortnn {

namespace {

using nlohmann::json;

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vec(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json mat(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::MatrixXd to_mat(const json& j) {
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != r) throw ConfigError("model: matrix row count mismatch");
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto row = to_vec(data[static_cast<std::size_t>(i)]);
        if (row.size() != c) throw ConfigError("model: matrix column count mismatch");
        m.row(i) = row.transpose();
    }
    return m;
}

json network_json(const Network& network) {
    return std::visit(
        [](const auto& net) -> json {
            using T = std::decay_t<decltype(net)>;
            if constexpr (std::is_same_v<T, MlpNetwork>) {
                return {{"hidden_weights", mat(net.hidden_weights)},
                        {"hidden_bias", vec(net.hidden_bias)},
                        {"output_weights", vec(net.output_weights)},
                        {"output_bias", net.output_bias}};
            } else if constexpr (std::is_same_v<T, RbfNetwork>) {
                return {{"centers", mat(net.centers)},
                        {"spreads", vec(net.spreads)},
                        {"output_weights", vec(net.output_weights)},
                        {"output_bias", net.output_bias}};
            } else if constexpr (std::is_same_v<T, GrnnModel>) {
                return {{"patterns", mat(net.patterns)}, {"targets", vec(net.targets)}, {"spreads", vec(net.spreads)}};
            } else {
                json units = json::array();
                for (const auto& u : net.hidden) units.push_back({{"weights", vec(u.weights)}, {"bias", u.bias}});
                return {{"hidden", units}, {"output_weights", vec(net.output_weights)}, {"output_bias", net.output_bias}};
            }
        },
        network);
}

Network network_from(ModelKind kind, const json& j) {
    switch (kind) {
        case ModelKind::mlp: {
            MlpNetwork n;
            n.hidden_weights = to_mat(j.at("hidden_weights"));
            n.hidden_bias = to_vec(j.at("hidden_bias"));
            n.output_weights = to_vec(j.at("output_weights"));
            n.output_bias = j.at("output_bias").get<double>();
            return n;
        }
        case ModelKind::rbfnn: {
            RbfNetwork n;
            n.centers = to_mat(j.at("centers"));
            n.spreads = to_vec(j.at("spreads"));
            n.output_weights = to_vec(j.at("output_weights"));
            n.output_bias = j.at("output_bias").get<double>();
            return n;
        }
        case ModelKind::grnn: {
            GrnnModel n;
            n.patterns = to_mat(j.at("patterns"));
            n.targets = to_vec(j.at("targets"));
            n.spreads = to_vec(j.at("spreads"));
            return n;
        }
        case ModelKind::ccnn: {
            CascadeNetwork n;
            for (const auto& u : j.at("hidden")) n.hidden.push_back({to_vec(u.at("weights")), u.at("bias").get<double>()});
            n.output_weights = to_vec(j.at("output_weights"));
            n.output_bias = j.at("output_bias").get<double>();
            return n;
        }
    }
    throw ConfigError("model: unknown kind");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError(std::string("unknown ") + what + " key '" + key + "'");
        }
    }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

}  // namespace

void to_json(json& j, const ScgConfig& c) {
    j = {{"convergence_tolerance", c.convergence_tolerance},
         {"max_iterations", c.max_iterations},
         {"min_gradient", c.min_gradient},
         {"min_improvement_delta", c.min_improvement_delta}};
}

void from_json(const json& j, ScgConfig& c) {
    reject_unknown(j, {"convergence_tolerance", "max_iterations", "min_gradient", "min_improvement_delta"}, "scg");
    read_opt(j, "convergence_tolerance", c.convergence_tolerance);
    read_opt(j, "max_iterations", c.max_iterations);
    read_opt(j, "min_gradient", c.min_gradient);
    read_opt(j, "min_improvement_delta", c.min_improvement_delta);
}

void to_json(json& j, const EstimatorConfig& c) {
    j = {{"kind", std::string(to_string(c.kind))},
         {"max_hidden", c.max_hidden},
         {"cv_folds", c.cv_folds},
         {"select_by_validation", c.select_by_validation},
         {"scg", c.scg},
         {"spread_search",
          {{"lower", c.spread_search.lower},
           {"upper", c.spread_search.upper},
           {"steps", c.spread_search.steps},
           {"sweeps", c.spread_search.sweeps}}},
         {"ridge", c.ridge},
         {"candidate_pool", c.candidate_pool},
         {"rbf_neighbors", c.rbf_neighbors}};
}

void from_json(const json& j, EstimatorConfig& c) {
    reject_unknown(j,
                   {"kind", "max_hidden", "cv_folds", "select_by_validation", "scg", "spread_search", "ridge",
                    "candidate_pool", "rbf_neighbors", "seed"},
                   "model config");
    if (j.contains("kind")) c.kind = model_kind_from_string(j.at("kind").get<std::string>());
    read_opt(j, "max_hidden", c.max_hidden);
    read_opt(j, "cv_folds", c.cv_folds);
    read_opt(j, "select_by_validation", c.select_by_validation);
    if (j.contains("scg")) from_json(j.at("scg"), c.scg);
    if (j.contains("spread_search")) {
        const auto& s = j.at("spread_search");
        reject_unknown(s, {"lower", "upper", "steps", "sweeps"}, "spread_search");
        read_opt(s, "lower", c.spread_search.lower);
        read_opt(s, "upper", c.spread_search.upper);
        read_opt(s, "steps", c.spread_search.steps);
        read_opt(s, "sweeps", c.spread_search.sweeps);
    }
    read_opt(j, "ridge", c.ridge);
    read_opt(j, "candidate_pool", c.candidate_pool);
    read_opt(j, "rbf_neighbors", c.rbf_neighbors);
    read_opt(j, "seed", c.seed);
}

json schema_to_json(const EncodingSchema& schema) {
    json vocab = json::array();
    for (const auto& v : schema.vocabularies) vocab.push_back({{"field", v.field}, {"categories", v.categories}});
    return {{"size_scaler", {{"center", schema.size_scaler.center}, {"scale", schema.size_scaler.scale}}},
            {"vocabularies", vocab}};
}

EncodingSchema schema_from_json(const json& j) {
    EncodingSchema s;
    s.size_scaler.center = j.at("size_scaler").at("center").get<double>();
    s.size_scaler.scale = j.at("size_scaler").at("scale").get<double>();
    for (const auto& v : j.at("vocabularies")) {
        s.vocabularies.push_back({v.at("field").get<std::string>(), v.at("categories").get<std::vector<std::string>>()});
    }
    return s;
}

json model_to_json(const EstimatorModel& model) {
    json trace = json::array();
    for (const auto& step : model.trace) {
        json s = {{"hidden", step.hidden}, {"training_error", step.training_error}};
        s["validation_error"] = step.validation_error ? json(*step.validation_error) : json(nullptr);
        trace.push_back(std::move(s));
    }
    return {{"format", "effortnn-model"},
            {"version", std::string(kVersion)},
            {"kind", std::string(to_string(model.kind))},
            {"seed", model.seed},
            {"schema", schema_to_json(model.schema)},
            {"target_scaler", {{"center", model.target_scaler.center}, {"scale", model.target_scaler.scale}}},
            {"field_spreads", model.field_spreads},
            {"trace", trace},
            {"network", network_json(model.network)}};
}

EstimatorModel model_from_json(const json& j) {
    try {
        if (j.value("format", std::string{}) != "effortnn-model") throw ConfigError("not an effortnn model document");
        EstimatorModel m;
        m.kind = model_kind_from_string(j.at("kind").get<std::string>());
        m.seed = j.at("seed").get<std::uint64_t>();
        m.schema = schema_from_json(j.at("schema"));
        m.target_scaler.center = j.at("target_scaler").at("center").get<double>();
        m.target_scaler.scale = j.at("target_scaler").at("scale").get<double>();
        m.field_spreads = j.at("field_spreads").get<std::vector<double>>();
        for (const auto& s : j.at("trace")) {
            GrowthStep step{s.at("hidden").get<int>(), s.at("training_error").get<double>(), std::nullopt};
            if (!s.at("validation_error").is_null()) step.validation_error = s.at("validation_error").get<double>();
            m.trace.push_back(step);
        }
        m.network = network_from(m.kind, j.at("network"));
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed model document: ") + e.what());
    }
}

void save_model(const EstimatorModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << model_to_json(model).dump(2) << '\n';
}

EstimatorModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    try {
        return model_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace effortnn
