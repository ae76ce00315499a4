#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "effortnn/dataset.hpp"
#include "effortnn/encoding.hpp"
#include "effortnn/error.hpp"
#include "effortnn/estimators.hpp"
#include "effortnn/model_io.hpp"
#include "effortnn/random.hpp"
#include "effortnn/synthetic.hpp"
#include "oracles.hpp"

using namespace effortnn;

namespace {

EncodedSplit synthetic_split(std::size_t band, double noise = 0.05, std::uint64_t seed = 7) {
    SyntheticSpec spec;
    spec.noise_dispersion = noise;
    spec.seed = seed;
    const auto filtered = filter_projects(generate_synthetic(spec), FilterSpec{}).records;
    const auto bands = band_by_productivity(filtered);
    return encode_features(chronological_split(bands.at(band)));
}

EstimatorConfig quick(ModelKind kind) {
    auto c = EstimatorConfig::defaults(kind);
    c.max_hidden = 6;
    c.cv_folds = 4;
    c.spread_search.steps = 9;
    c.spread_search.sweeps = 1;
    c.seed = 3;
    return c;
}

std::vector<std::vector<double>> rows_of(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out.emplace_back(m.row(i).data(), m.row(i).data() + 0);
        out.back().resize(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.back()[static_cast<std::size_t>(c)] = m(i, c);
    }
    return out;
}

Eigen::MatrixXd random_matrix(RandomSource& rng, Eigen::Index n, Eigen::Index d) {
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < d; ++c) m(i, c) = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("mlp gradient matches central differences") {
    RandomSource rng(11);
    for (Eigen::Index hidden : {1, 4, 11}) {
        const Eigen::MatrixXd x = random_matrix(rng, 15, 3);
        Eigen::VectorXd y(15);
        for (Eigen::Index i = 0; i < 15; ++i) y(i) = rng.normal();
        Eigen::VectorXd w(MlpNetwork::parameter_count(hidden, 3));
        for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-1, 1);
        Eigen::VectorXd grad;
        mlp_loss(w, hidden, x, y, &grad);
        REQUIRE(grad.size() == w.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const double h = 1e-6;
            Eigen::VectorXd wp = w, wm = w;
            wp(i) += h;
            wm(i) -= h;
            const double fd = (mlp_loss(wp, hidden, x, y, nullptr) - mlp_loss(wm, hidden, x, y, nullptr)) / (2 * h);
            CHECK(std::abs(grad(i) - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("mlp pack and unpack are inverse") {
    RandomSource rng(2);
    const Eigen::MatrixXd x = random_matrix(rng, 10, 2);
    const Eigen::VectorXd y = x.col(0);
    const auto net = initial_mlp(x, y, 3, rng, 1e-8);
    const auto back = MlpNetwork::unpack(net.pack(), 3, 2);
    CHECK(back.forward(x).isApprox(net.forward(x)));
}

TEST_CASE("rbf network with every point as a center interpolates") {
    RandomSource rng(5);
    for (Eigen::Index n : {5, 12, 30}) {
        const Eigen::MatrixXd x = random_matrix(rng, n, 2);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = std::sin(x(i, 0)) + x(i, 1) * x(i, 1);
        const auto spreads = rbf_spreads(x, 5, median_pairwise_distance(x));
        const auto net = fit_rbf_output(x, y, x, spreads, 1e-10);
        const Eigen::VectorXd fit = net.forward(x);
        for (Eigen::Index i = 0; i < n; ++i) CHECK(std::abs(fit(i) - y(i)) <= 1e-4 * std::max(1.0, std::abs(y(i))));
    }
}

TEST_CASE("rbf forward selection picks distinct training points") {
    RandomSource rng(9);
    const Eigen::MatrixXd x = random_matrix(rng, 25, 2);
    const Eigen::VectorXd y = x.col(0).array().square() + x.col(1).array();
    const double variance = (y.array() - y.mean()).square().mean();
    RbfForwardSelector sel(x, y, 1e-8, 5);
    for (int k = 0; k < 10 && sel.add_center(); ++k) {
    }
    REQUIRE(sel.center_count() >= 1);
    auto chosen = sel.selected();
    std::sort(chosen.begin(), chosen.end());
    CHECK(std::adjacent_find(chosen.begin(), chosen.end()) == chosen.end());
    CHECK(sel.training_mse() < variance);
    CHECK(sel.network().centers.row(0) == x.row(sel.selected()[0]));
}

TEST_CASE("rbf and grnn predictions ignore the order of training rows") {
    RandomSource rng(29);
    const Eigen::MatrixXd x = random_matrix(rng, 12, 2);
    const Eigen::VectorXd y = x.col(0) + x.col(1).array().sin().matrix();
    std::vector<Eigen::Index> order(12);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    rng.shuffle(std::span<Eigen::Index>(order));
    Eigen::MatrixXd xp(12, 2);
    Eigen::VectorXd yp(12);
    for (Eigen::Index i = 0; i < 12; ++i) {
        xp.row(i) = x.row(order[static_cast<std::size_t>(i)]);
        yp(i) = y(order[static_cast<std::size_t>(i)]);
    }
    const Eigen::MatrixXd q = random_matrix(rng, 5, 2);

    const Eigen::VectorXd s = Eigen::VectorXd::Constant(2, 0.8);
    const GrnnModel g{x, y, s}, gp{xp, yp, s};
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const std::vector<double> row{q(i, 0), q(i, 1)};
        CHECK(gp.predict(row).value == doctest::Approx(g.predict(row).value).epsilon(1e-12));
    }
    const auto r = fit_rbf_output(x, y, x, rbf_spreads(x, 5, 1.0), 1e-8);
    const auto rp = fit_rbf_output(xp, yp, xp, rbf_spreads(xp, 5, 1.0), 1e-8);
    const Eigen::VectorXd a = r.forward(q), b = rp.forward(q);
    for (Eigen::Index i = 0; i < q.rows(); ++i) CHECK(b(i) == doctest::Approx(a(i)).epsilon(1e-8));
}

TEST_CASE("grnn prediction equals the kernel-weighted average") {
    RandomSource rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.below(20));
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(5));
        GrnnModel g{random_matrix(rng, n, d), Eigen::VectorXd(n), Eigen::VectorXd(d)};
        for (Eigen::Index i = 0; i < n; ++i) g.targets(i) = rng.uniform(0, 100);
        std::vector<double> bw(static_cast<std::size_t>(d));
        for (Eigen::Index c = 0; c < d; ++c) bw[static_cast<std::size_t>(c)] = g.spreads(c) = rng.uniform(0.3, 2.0);
        const auto patterns = rows_of(g.patterns);
        const std::vector<double> t(g.targets.data(), g.targets.data() + n);
        std::vector<double> q(static_cast<std::size_t>(d));
        for (auto& v : q) v = rng.normal();
        const auto out = g.predict(q);
        CHECK_FALSE(out.nearest_neighbor_fallback);
        CHECK(std::abs(out.value - oracle::nadaraya_watson(patterns, t, bw, q)) <= 1e-9);
    }
}

TEST_CASE("grnn edge cases") {
    GrnnModel single{Eigen::MatrixXd::Constant(1, 2, 1.0), Eigen::VectorXd::Constant(1, 42.0), Eigen::VectorXd::Ones(2)};
    CHECK(single.predict(std::vector<double>{-3.0, 7.0}).value == doctest::Approx(42.0));

    Eigen::MatrixXd two(2, 1);
    two << -1.0, 1.0;
    Eigen::VectorXd ty(2);
    ty << 10.0, 30.0;
    GrnnModel pair{two, ty, Eigen::VectorXd::Ones(1)};
    CHECK(pair.predict(std::vector<double>{0.0}).value == doctest::Approx(20.0));

    GrnnModel narrow{two, ty, Eigen::VectorXd::Constant(1, 1e-3)};
    const auto far = narrow.predict(std::vector<double>{50.0});
    CHECK(far.nearest_neighbor_fallback);
    CHECK(far.value == 30.0);

    // Small spreads approach the nearest neighbour.
    RandomSource rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd p = random_matrix(rng, 15, 3);
        Eigen::VectorXd t(15);
        for (Eigen::Index i = 0; i < 15; ++i) t(i) = rng.uniform(0, 50);
        const std::vector<double> bw(3, 0.02);
        const GrnnModel tiny{p, t, Eigen::VectorXd::Constant(3, 0.02)};
        const std::vector<double> q{rng.normal(), rng.normal(), rng.normal()};
        const auto nn = oracle::nearest_pattern(rows_of(p), bw, q);
        CHECK(tiny.predict(q).value == doctest::Approx(t(static_cast<Eigen::Index>(nn))).epsilon(1e-6));
    }

    const auto grid = log_grid(0.05, 5.0, 25);
    CHECK(grid.size() == 25);
    CHECK(grid.front() == 0.05);
    CHECK(grid.back() == 5.0);
}

TEST_CASE("cascade growth never raises the training error") {
    RandomSource rng(17);
    const Eigen::MatrixXd x = random_matrix(rng, 40, 3);
    Eigen::VectorXd y(40);
    for (Eigen::Index i = 0; i < 40; ++i) y(i) = std::tanh(2 * x(i, 0)) * x(i, 1) + 0.1 * rng.normal();
    CascadeGrower grower(x, y, CascadeOptions{}, rng.split(1));
    double prev = grower.training_mse();
    CHECK(prev == doctest::Approx(oracle::linear_least_squares_mse(x, y)).epsilon(1e-6));
    for (int k = 0; k < 6 && grower.install_next(); ++k) {
        CHECK(grower.training_mse() <= prev);
        prev = grower.training_mse();
    }
    CHECK(grower.network().hidden_count() >= 1);
}

TEST_CASE("cascade adds nothing to an exactly linear target") {
    RandomSource rng(19);
    const Eigen::MatrixXd x = random_matrix(rng, 30, 2);
    const Eigen::VectorXd y = 3.0 * x.col(0) - 2.0 * x.col(1) + Eigen::VectorXd::Constant(30, 0.5);
    CascadeGrower grower(x, y, CascadeOptions{}, rng.split(2));
    CHECK_FALSE(grower.install_next());
    CHECK(grower.finished());
    CHECK(grower.network().hidden_count() == 0);
    CHECK(grower.training_mse() < 1e-12);
}

TEST_CASE("cascade beats least squares on xor") {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 0, 1, 1, 0, 1, 1;
    Eigen::VectorXd y(4);
    y << 0, 1, 1, 0;
    CascadeGrower grower(x, y, CascadeOptions{}, RandomSource(23));
    for (int k = 0; k < 3 && grower.install_next(); ++k) {
    }
    CHECK(grower.network().hidden_count() >= 1);
    CHECK(grower.training_mse() < oracle::linear_least_squares_mse(x, y) - 1e-3);
}

TEST_CASE("config validation and kind names") {
    CHECK(model_kind_from_string("ccnn") == ModelKind::ccnn);
    CHECK(to_string(ModelKind::rbfnn) == "RBFNN");
    CHECK_THROWS_AS(model_kind_from_string("svm"), ConfigError);
    auto c = EstimatorConfig::defaults(ModelKind::mlp);
    c.max_hidden = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = EstimatorConfig::defaults(ModelKind::grnn);
    c.spread_search.lower = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    nlohmann::json j = EstimatorConfig::defaults(ModelKind::ccnn);
    CHECK(j.get<EstimatorConfig>().kind == ModelKind::ccnn);
    j["learning_rate"] = 0.1;
    CHECK_THROWS_AS(j.get<EstimatorConfig>(), ConfigError);
    CHECK(nlohmann::json::object({{"max_hidden", 4}}).get<EstimatorConfig>().cv_folds == 10);
}

TEST_CASE("every kind trains deterministically and round-trips through json") {
    const auto data = synthetic_split(0);
    for (ModelKind kind : kAllModelKinds) {
        CAPTURE(to_string(kind));
        const auto cfg = quick(kind);
        const auto a = train(data.train, cfg);
        const auto b = train(data.train, cfg);
        CHECK(model_to_json(a) == model_to_json(b));
        CHECK(a.hidden_count() >= (kind == ModelKind::ccnn ? 0 : 1));
        CHECK_FALSE(a.trace.empty());

        const auto restored = model_from_json(model_to_json(a));
        CHECK(raw_predictions(restored, data.test.features) == raw_predictions(a, data.test.features));
        for (const auto& p : predict(a, data.test.features)) CHECK(p.effort >= 0.0);

        const std::vector<double> wrong(3, 0.0);
        CHECK_THROWS_AS(predict(a, wrong), DomainError);
    }
}

TEST_CASE("different seeds give different mlp weights") {
    const auto data = synthetic_split(1);
    auto cfg = quick(ModelKind::mlp);
    const auto a = train(data.train, cfg);
    cfg.seed = 99;
    CHECK(model_to_json(a) != model_to_json(train(data.train, cfg)));
}

TEST_CASE("negative network output is clamped to zero") {
    const auto data = synthetic_split(0);
    auto model = train(data.train, quick(ModelKind::mlp));
    std::get<MlpNetwork>(model.network).output_bias = -1e6;
    const auto preds = predict(model, data.test.features);
    for (const auto& p : preds) {
        CHECK(p.effort == 0.0);
        CHECK(p.clamped);
    }
    CHECK(raw_predictions(model, data.test.features).maxCoeff() < 0.0);
}

TEST_CASE("grnn without search uses fixed spreads") {
    const auto data = synthetic_split(2);
    const std::vector<double> spreads(4, 0.7);
    const auto model = make_grnn(data.train, spreads);
    CHECK(model.field_spreads == spreads);
    CHECK(model.hidden_count() == data.train.rows());
}

TEST_CASE("permutation importance puts size first when effort follows size") {
    const auto data = synthetic_split(0, 0.0);
    const auto model = train(data.train, quick(ModelKind::grnn));
    const auto ranking = permutation_importance(model, data.test, 10, 5);
    REQUIRE(ranking.size() == 4);
    CHECK(ranking[0].field == "afp");
    CHECK(ranking[0].rank == 1);
    CHECK(ranking[3].rank == 4);
    CHECK(permutation_importance(model, data.test, 10, 5)[0].score == ranking[0].score);
    CHECK_THROWS_AS(permutation_importance(model, data.test, 0), DomainError);

    const auto tied = rank_importances({{"b", 1.0, 0}, {"a", 1.0, 0}, {"c", 2.0, 0}});
    CHECK(tied[0].field == "c");
    CHECK(tied[1].field == "a");
}
