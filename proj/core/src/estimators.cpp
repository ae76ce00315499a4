#include "effortnn/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "effortnn/error.hpp"
#include "effortnn/evaluation.hpp"
#include "effortnn/numeric.hpp"
#include "effortnn/table_io.hpp"

namespace effortnn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FoldData {
    Eigen::MatrixXd x_train, x_val;
    Eigen::VectorXd y_train, y_val;
};

Scaler fit_target_scaler(const Eigen::VectorXd& y) {
    const auto values = values_of(y);
    const double sd = sample_sd(values);
    return {mean_of(values), sd > 0.0 ? sd : 1.0};
}

Eigen::VectorXd standardize(const Eigen::VectorXd& y, const Scaler& s) {
    return (y.array() - s.center) / s.scale;
}

std::vector<FoldData> make_folds(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const EstimatorConfig& config) {
    const auto n = static_cast<std::size_t>(x.rows());
    if (n < 2) return {};
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.cv_folds), n);
    std::vector<FoldData> out;
    for (const auto& fold : kfold_indices(n, k, config.seed)) {
        std::vector<bool> in_val(n, false);
        for (auto i : fold) in_val[static_cast<std::size_t>(i)] = true;
        FoldData fd;
        fd.x_train.resize(static_cast<Eigen::Index>(n - fold.size()), x.cols());
        fd.y_train.resize(fd.x_train.rows());
        fd.x_val.resize(static_cast<Eigen::Index>(fold.size()), x.cols());
        fd.y_val.resize(fd.x_val.rows());
        Eigen::Index t = 0, v = 0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (in_val[static_cast<std::size_t>(i)]) {
                fd.x_val.row(v) = x.row(i);
                fd.y_val[v++] = y[i];
            } else {
                fd.x_train.row(t) = x.row(i);
                fd.y_train[t++] = y[i];
            }
        }
        out.push_back(std::move(fd));
    }
    return out;
}

double mse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
    return (predicted - actual).squaredNorm() / static_cast<double>(actual.size());
}

// Random stream for a (hidden count, fold) pair; fold 0 is the final fit on all data.
RandomSource stream_for(const EstimatorConfig& config, std::uint64_t hidden, std::uint64_t fold) {
    return RandomSource(config.seed).split(static_cast<std::uint64_t>(config.kind) + 1).split(hidden * 1009 + fold);
}

EstimatorModel model_shell(const DesignMatrix& train, const EstimatorConfig& config, Scaler target_scaler) {
    EstimatorModel m;
    m.kind = config.kind;
    m.schema = train.schema;
    m.target_scaler = target_scaler;
    m.seed = config.seed;
    return m;
}

void require_kind(const EstimatorConfig& config, ModelKind expected) {
    config.validate();
    if (config.kind != expected) {
        throw ConfigError(std::string("trainer for ") + std::string(to_string(expected)) + " received a " +
                          std::string(to_string(config.kind)) + " config");
    }
}

void require_rows(const DesignMatrix& train) {
    if (train.rows() == 0) throw TrainingError("training set is empty");
    if (train.features.cols() != train.schema.width()) throw DomainError("design matrix width does not match schema");
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::mlp: return "MLP";
        case ModelKind::rbfnn: return "RBFNN";
        case ModelKind::grnn: return "GRNN";
        case ModelKind::ccnn: return "CCNN";
    }
    return "MLP";
}

ModelKind model_kind_from_string(std::string_view name) {
    for (auto k : kAllModelKinds) {
        if (iequals(trim(name), to_string(k))) return k;
    }
    throw ConfigError("unknown model kind '" + std::string(name) + "' (expected MLP, RBFNN, GRNN or CCNN)");
}

void EstimatorConfig::validate() const {
    if (max_hidden < 0) throw ConfigError("max_hidden must be >= 0");
    if (cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
    if (!(spread_search.lower > 0.0) || !(spread_search.upper >= spread_search.lower) || spread_search.steps < 1 ||
        spread_search.sweeps < 0) {
        throw ConfigError("spread grid must be positive and ordered");
    }
    if (!(ridge >= 0.0)) throw ConfigError("ridge must be non-negative");
    if (candidate_pool < 1) throw ConfigError("candidate_pool must be >= 1");
    if (rbf_neighbors < 1) throw ConfigError("rbf_neighbors must be >= 1");
    scg.validate();
}

EstimatorConfig EstimatorConfig::defaults(ModelKind kind) {
    EstimatorConfig c;
    c.kind = kind;
    return c;
}

int EstimatorModel::hidden_count() const {
    return std::visit(
        [](const auto& net) -> int {
            using T = std::decay_t<decltype(net)>;
            if constexpr (std::is_same_v<T, GrnnModel>) return static_cast<int>(net.patterns.rows());
            else return static_cast<int>(net.hidden_count());
        },
        network);
}

EstimatorModel train_mlp(const DesignMatrix& train, const EstimatorConfig& config) {
    require_kind(config, ModelKind::mlp);
    require_rows(train);
    if (config.max_hidden < 1) throw ConfigError("MLP needs max_hidden >= 1");
    const Scaler scaler = fit_target_scaler(train.targets);
    const Eigen::VectorXd y = standardize(train.targets, scaler);
    EstimatorModel model = model_shell(train, config, scaler);

    int chosen = config.max_hidden;
    const auto folds = config.select_by_validation ? make_folds(train.features, y, config) : std::vector<FoldData>{};
    if (!folds.empty()) {
        chosen = 0;
        double best = kInf, previous = kInf;
        for (int h = 1; h <= config.max_hidden; ++h) {
            double train_sum = 0.0, val_sum = 0.0;
            std::size_t ok = 0;
            for (std::size_t f = 0; f < folds.size(); ++f) {
                auto rng = stream_for(config, static_cast<std::uint64_t>(h), f + 1);
                try {
                    const auto fit = fit_mlp(folds[f].x_train, folds[f].y_train, h, config.scg, rng, config.ridge);
                    train_sum += fit.optimizer.loss;
                    val_sum += mse(fit.network.forward(folds[f].x_val), folds[f].y_val);
                    ++ok;
                } catch (const NumericalError&) {
                }
            }
            if (ok == 0) {
                model.trace.push_back({h, kInf, std::nullopt});
                continue;
            }
            const double val = val_sum / static_cast<double>(ok);
            model.trace.push_back({h, train_sum / static_cast<double>(ok), val});
            if (val < best) {
                best = val;
                chosen = h;
            }
            if (val > previous) break;  // validation error began to rise
            previous = val;
        }
        if (chosen == 0) throw TrainingError("MLP: every growth step failed numerically");
    }

    auto rng = stream_for(config, static_cast<std::uint64_t>(chosen), 0);
    try {
        auto fit = fit_mlp(train.features, y, chosen, config.scg, rng, config.ridge);
        if (folds.empty()) model.trace.push_back({chosen, fit.optimizer.loss, std::nullopt});
        model.network = std::move(fit.network);
    } catch (const NumericalError& e) {
        throw TrainingError(std::string("MLP: final fit failed: ") + e.what());
    }
    return model;
}

EstimatorModel train_rbfnn(const DesignMatrix& train, const EstimatorConfig& config) {
    require_kind(config, ModelKind::rbfnn);
    require_rows(train);
    const Scaler scaler = fit_target_scaler(train.targets);
    const Eigen::VectorXd y = standardize(train.targets, scaler);
    EstimatorModel model = model_shell(train, config, scaler);

    int target = config.max_hidden;
    const auto folds = config.select_by_validation ? make_folds(train.features, y, config) : std::vector<FoldData>{};
    if (!folds.empty()) {
        std::vector<RbfForwardSelector> selectors;
        for (const auto& f : folds) selectors.emplace_back(f.x_train, f.y_train, config.ridge, config.rbf_neighbors);
        target = 0;
        double best = kInf, previous = kInf;
        for (int m = 1; m <= config.max_hidden; ++m) {
            bool grew = false;
            for (auto& s : selectors) grew = s.add_center() || grew;
            if (!grew) break;
            double train_sum = 0.0, val_sum = 0.0;
            for (std::size_t f = 0; f < folds.size(); ++f) {
                train_sum += selectors[f].training_mse();
                val_sum += mse(selectors[f].network().forward(folds[f].x_val), folds[f].y_val);
            }
            const double k = static_cast<double>(folds.size());
            const double val = val_sum / k;
            model.trace.push_back({m, train_sum / k, val});
            if (val < best) {
                best = val;
                target = m;
            }
            if (val >= previous) break;  // validation error stopped improving
            previous = val;
        }
    }

    RbfForwardSelector full(train.features, y, config.ridge, config.rbf_neighbors);
    while (full.center_count() < target && full.add_center()) {
    }
    if (folds.empty()) model.trace.push_back({static_cast<int>(full.center_count()), full.training_mse(), std::nullopt});
    model.network = full.network();
    return model;
}

EstimatorModel make_grnn(const DesignMatrix& train, const std::vector<double>& field_spreads) {
    require_rows(train);
    std::vector<Eigen::Index> widths;
    for (const auto& b : train.schema.blocks()) widths.push_back(b.width);
    for (double s : field_spreads) {
        if (!(s > 0.0)) throw DomainError("make_grnn: spreads must be positive");
    }
    EstimatorModel model;
    model.kind = ModelKind::grnn;
    model.schema = train.schema;
    model.field_spreads = field_spreads;
    GrnnModel grnn;
    grnn.patterns = train.features;
    grnn.targets = train.targets;
    grnn.spreads = expand_field_spreads(field_spreads, widths);
    model.network = std::move(grnn);
    return model;
}

EstimatorModel train_grnn(const DesignMatrix& train, const EstimatorConfig& config) {
    require_kind(config, ModelKind::grnn);
    require_rows(train);
    std::vector<Eigen::Index> widths;
    for (const auto& b : train.schema.blocks()) widths.push_back(b.width);
    const auto grid = log_grid(config.spread_search.lower, config.spread_search.upper, config.spread_search.steps);

    std::vector<double> spreads(widths.size(), grid[grid.size() / 2]);
    std::optional<double> cv_mar;
    const auto n = static_cast<std::size_t>(train.rows());
    if (config.select_by_validation && n >= 2) {
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(config.cv_folds), n);
        GrnnSpreadSearch search(train.features, train.targets, widths, kfold_indices(n, k, config.seed));
        spreads = search.coordinate_descent(grid, config.spread_search.sweeps);
        cv_mar = search.cross_validated_mar(spreads);
    }
    EstimatorModel model = make_grnn(train, spreads);
    model.seed = config.seed;
    const auto fitted = predicted_effort(predict(model, train.features));
    model.trace.push_back({static_cast<int>(n), mar(values_of(train.targets), values_of(fitted)), cv_mar});
    return model;
}

EstimatorModel train_ccnn(const DesignMatrix& train, const EstimatorConfig& config) {
    require_kind(config, ModelKind::ccnn);
    require_rows(train);
    const Scaler scaler = fit_target_scaler(train.targets);
    const Eigen::VectorXd y = standardize(train.targets, scaler);
    EstimatorModel model = model_shell(train, config, scaler);

    CascadeOptions options;
    options.candidate_pool = config.candidate_pool;
    options.ridge = config.ridge;
    options.min_improvement = config.scg.min_improvement_delta;
    options.scg = config.scg;

    int target = config.max_hidden;
    const auto folds = config.select_by_validation ? make_folds(train.features, y, config) : std::vector<FoldData>{};
    if (!folds.empty()) {
        std::vector<CascadeGrower> growers;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            growers.emplace_back(folds[f].x_train, folds[f].y_train, options, stream_for(config, 0, f + 1));
        }
        const double k = static_cast<double>(folds.size());
        auto record = [&](int hidden) {
            double train_sum = 0.0, val_sum = 0.0;
            for (std::size_t f = 0; f < folds.size(); ++f) {
                train_sum += growers[f].training_mse();
                val_sum += mse(growers[f].network().forward(folds[f].x_val), folds[f].y_val);
            }
            model.trace.push_back({hidden, train_sum / k, val_sum / k});
            return val_sum / k;
        };
        double best = record(0), previous = best;
        target = 0;
        for (int h = 1; h <= config.max_hidden; ++h) {
            bool grew = false;
            for (auto& g : growers) grew = g.install_next() || grew;
            if (!grew) break;
            const double val = record(h);
            if (val < best) {
                best = val;
                target = h;
            }
            if (val >= previous) break;  // validation residual not reduced
            previous = val;
        }
    }

    CascadeGrower full(train.features, y, options, stream_for(config, 0, 0));
    while (full.network().hidden_count() < target && full.install_next()) {
    }
    if (folds.empty()) {
        model.trace.push_back({static_cast<int>(full.network().hidden_count()), full.training_mse(), std::nullopt});
    }
    model.network = full.network();
    return model;
}

EstimatorModel train(const DesignMatrix& data, const EstimatorConfig& config) {
    switch (config.kind) {
        case ModelKind::mlp: return train_mlp(data, config);
        case ModelKind::rbfnn: return train_rbfnn(data, config);
        case ModelKind::grnn: return train_grnn(data, config);
        case ModelKind::ccnn: return train_ccnn(data, config);
    }
    throw ConfigError("unknown model kind");
}

Eigen::VectorXd raw_predictions(const EstimatorModel& model, const Eigen::MatrixXd& features) {
    if (features.cols() != model.input_dim()) {
        throw DomainError("predict: feature width " + std::to_string(features.cols()) + " but model expects " +
                          std::to_string(model.input_dim()));
    }
    return std::visit(
        [&](const auto& net) -> Eigen::VectorXd {
            using T = std::decay_t<decltype(net)>;
            if constexpr (std::is_same_v<T, GrnnModel>) {
                Eigen::VectorXd out(features.rows());
                for (Eigen::Index i = 0; i < features.rows(); ++i) {
                    const Eigen::RowVectorXd row = features.row(i);
                    out[i] = net.predict({row.data(), static_cast<std::size_t>(row.size())}).value;
                }
                return out;
            } else {
                return (net.forward(features).array() * model.target_scaler.scale) + model.target_scaler.center;
            }
        },
        model.network);
}

std::vector<Prediction> predict(const EstimatorModel& model, const Eigen::MatrixXd& features) {
    if (features.cols() != model.input_dim()) {
        throw DomainError("predict: feature width " + std::to_string(features.cols()) + " but model expects " +
                          std::to_string(model.input_dim()));
    }
    std::vector<Prediction> out(static_cast<std::size_t>(features.rows()));
    if (const auto* grnn = std::get_if<GrnnModel>(&model.network)) {
        for (Eigen::Index i = 0; i < features.rows(); ++i) {
            const Eigen::RowVectorXd row = features.row(i);
            const auto o = grnn->predict({row.data(), static_cast<std::size_t>(row.size())});
            out[static_cast<std::size_t>(i)] = {o.value, false, o.nearest_neighbor_fallback};
        }
    } else {
        const Eigen::VectorXd raw = raw_predictions(model, features);
        for (Eigen::Index i = 0; i < raw.size(); ++i) out[static_cast<std::size_t>(i)].effort = raw[i];
    }
    for (auto& p : out) {
        if (p.effort < 0.0) {
            p.effort = 0.0;
            p.clamped = true;
        }
    }
    return out;
}

Prediction predict(const EstimatorModel& model, std::span<const double> features) {
    const Eigen::Map<const Eigen::RowVectorXd> row(features.data(), static_cast<Eigen::Index>(features.size()));
    return predict(model, Eigen::MatrixXd(row)).front();
}

Eigen::VectorXd predicted_effort(std::span<const Prediction> predictions) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(predictions.size()));
    for (std::size_t i = 0; i < predictions.size(); ++i) v[static_cast<Eigen::Index>(i)] = predictions[i].effort;
    return v;
}

}  // namespace effortnn
