#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "effortnn/dataset.hpp"
#include "effortnn/error.hpp"
#include "effortnn/evaluation.hpp"
#include "effortnn/experiment.hpp"
#include "effortnn/random.hpp"
#include "effortnn/report.hpp"
#include "effortnn/synthetic.hpp"
#include "oracles.hpp"

using namespace effortnn;

namespace {

std::vector<Split> synthetic_splits(double noise) {
    SyntheticSpec spec;
    spec.noise_dispersion = noise;
    std::vector<Split> out;
    for (const auto& band : band_by_productivity(filter_projects(generate_synthetic(spec), FilterSpec{}).records))
        out.push_back(chronological_split(band));
    return out;
}

std::vector<EstimatorConfig> quick_configs(std::vector<ModelKind> kinds) {
    std::vector<EstimatorConfig> out;
    for (auto kind : kinds) {
        auto c = EstimatorConfig::defaults(kind);
        c.max_hidden = 8;
        c.cv_folds = 5;
        c.spread_search.steps = 11;
        c.spread_search.sweeps = 1;
        out.push_back(c);
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> random_pair(RandomSource& rng, std::size_t n) {
    std::vector<double> a(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform(1, 5000);
        p[i] = rng.uniform(1, 5000);
    }
    return {a, p};
}

}  // namespace

TEST_CASE("metric examples") {
    const std::vector<double> a{10, 20, 30}, p{12, 18, 33};
    CHECK(mar(a, a) == 0.0);
    CHECK(mar(a, p) == doctest::Approx(7.0 / 3));
    CHECK(mr(a, a) == 0.0);
    CHECK(mr(std::vector<double>{10}, std::vector<double>{15}) == -5.0);
    const auto rel = optional_relative_metrics(std::vector<double>{100}, std::vector<double>{50});
    CHECK(*rel.mmre == 0.5);
    CHECK(*rel.mmer == 1.0);
    const auto perfect = optional_relative_metrics(a, a);
    CHECK(*perfect.mmre == 0.0);
    CHECK(*perfect.mmer == 0.0);
    CHECK_FALSE(optional_relative_metrics(std::vector<double>{0}, std::vector<double>{1}).mmre);
    CHECK_FALSE(optional_relative_metrics(std::vector<double>{1}, std::vector<double>{0}).mmer);
    CHECK_THROWS_AS(mar(a, std::vector<double>{1}), DomainError);
    CHECK_THROWS_AS(mr(std::vector<double>{}, std::vector<double>{}), DomainError);

    const auto m = evaluate_predictions(a, p, true);
    CHECK(m.n == 3);
    CHECK(m.mmre.has_value());
    CHECK_FALSE(evaluate_predictions(a, p).mmre.has_value());
}

TEST_CASE("metrics agree with the oracles on random vectors") {
    RandomSource rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto [a, p] = random_pair(rng, 1 + rng.below(200));
        const double m = mar(a, p), r = mr(a, p);
        CHECK(std::abs(m - oracle::mean_abs_residual(a, p)) <= 1e-12 * std::max(1.0, m));
        CHECK(std::abs(r - oracle::mean_residual(a, p)) <= 1e-12 * std::max(1.0, std::abs(m)));
        CHECK(std::abs(r) <= m + 1e-9);
        CHECK(mar(p, a) == doctest::Approx(m).epsilon(1e-14));
        CHECK(mr(p, a) == doctest::Approx(-r).epsilon(1e-12));
        const auto rel = optional_relative_metrics(a, p);
        CHECK(*rel.mmre == doctest::Approx(oracle::mmre(a, p)).epsilon(1e-12));
        CHECK(*rel.mmer == doctest::Approx(oracle::mmer(a, p)).epsilon(1e-12));
    }
}

TEST_CASE("metrics scale with their inputs") {
    RandomSource rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        auto [a, p] = random_pair(rng, 20);
        const double c = rng.uniform(0.1, 10);
        const double m = mar(a, p), r = mr(a, p);
        for (auto& v : a) v *= c;
        for (auto& v : p) v *= c;
        CHECK(mar(a, p) == doctest::Approx(c * m).epsilon(1e-12));
        CHECK(mr(a, p) == doctest::Approx(c * r).epsilon(1e-9));
    }
}

TEST_CASE("bias classification") {
    MetricResult m;
    m.mr = 0;
    CHECK(classify_bias(m).verdict == Bias::neutral);
    m.mr = -290;
    CHECK(classify_bias(m).verdict == Bias::overestimates);
    m.mr = 297;
    CHECK(classify_bias(m).verdict == Bias::underestimates);
    CHECK(classify_bias(m, 300).verdict == Bias::neutral);
    CHECK_THROWS_AS(classify_bias(m, -1), DomainError);
    CHECK(to_string(Bias::overestimates) == "overestimates");
}

TEST_CASE("k-fold partitions") {
    const auto ten = kfold_indices(10, 10, 1);
    CHECK(ten.size() == 10);
    for (const auto& f : ten) CHECK(f.size() == 1);

    const auto three = kfold_indices(10, 3, 1);
    std::vector<std::size_t> sizes;
    for (const auto& f : three) sizes.push_back(f.size());
    CHECK(sizes == std::vector<std::size_t>{4, 3, 3});
    CHECK(kfold_indices(10, 3, 1) == three);
    CHECK(kfold_indices(10, 3, 2) != three);

    RandomSource rng(107);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(100);
        const std::size_t k = 2 + rng.below(n - 1);
        const auto folds = kfold_indices(n, k, rng.next_u64());
        std::set<Eigen::Index> seen;
        std::size_t lo = n, hi = 0;
        for (const auto& f : folds) {
            lo = std::min(lo, f.size());
            hi = std::max(hi, f.size());
            seen.insert(f.begin(), f.end());
        }
        CHECK(folds.size() == k);
        CHECK(seen.size() == n);
        CHECK(*seen.rbegin() == static_cast<Eigen::Index>(n - 1));
        CHECK(hi - lo <= 1);
    }
    CHECK_THROWS_AS(kfold_indices(3, 4, 0), DomainError);
    CHECK_THROWS_AS(kfold_indices(3, 1, 0), DomainError);
}

TEST_CASE("benchmark grid with a baseline") {
    const auto splits = synthetic_splits(0.0);
    BenchmarkOptions opt;
    opt.baseline = true;
    opt.importance_repeats = 3;
    const auto report = run_benchmark(splits, quick_configs({ModelKind::mlp, ModelKind::rbfnn, ModelKind::grnn, ModelKind::ccnn}), 42, opt);
    CHECK(report.datasets.size() == 5);
    CHECK(report.models == std::vector<std::string>{"MLP", "RBFNN", "GRNN", "CCNN", "Baseline"});
    CHECK(report.cells.size() == 25);
    CHECK(report.pairwise.size() == 25);
    for (std::size_t d = 0; d < splits.size(); ++d) {
        const auto& name = report.datasets[d].name;
        CHECK(report.datasets[d].test_size == splits[d].test.size());
        const auto* base = report.cell(name, kBaselineName);
        REQUIRE(base != nullptr);
        REQUIRE(base->ok);
        // The baseline predicts the training mean everywhere.
        double train_mean = 0;
        for (const auto& r : splits[d].train) train_mean += *r.normalised_effort;
        train_mean /= static_cast<double>(splits[d].train.size());
        std::vector<double> constant(base->actual.size(), train_mean);
        CHECK(base->metrics.mar == doctest::Approx(mar(base->actual, constant)));
        for (const auto& model : {"MLP", "GRNN", "RBFNN", "CCNN"}) {
            const auto* c = report.cell(name, model);
            REQUIRE(c != nullptr);
            CHECK_MESSAGE(c->ok, c->error);
            CHECK(c->metrics.mar <= base->metrics.mar);
            CHECK(c->abs_residuals.size() == splits[d].test.size());
            CHECK(c->metrics.mar == doctest::Approx(oracle::mean_abs_residual(c->actual, c->predicted)));
            CHECK(c->significance.size() == 4);
        }
        REQUIRE(report.datasets[d].winner.has_value());
        CHECK(*report.datasets[d].winner != "Baseline");
    }
    CHECK(report.metadata.contains("data_digest"));
}

TEST_CASE("benchmark runs are reproducible and a single model has no pairwise tests") {
    const auto splits = synthetic_splits(0.2);
    BenchmarkOptions opt;
    opt.importance_repeats = 2;
    opt.threads = 2;
    const auto configs = quick_configs({ModelKind::grnn});
    const auto a = run_benchmark(splits, configs, 5, opt);
    opt.threads = 1;
    const auto b = run_benchmark(splits, configs, 5, opt);
    CHECK(without_timing(report_to_json(a)) == without_timing(report_to_json(b)));
    CHECK(a.pairwise.empty());
    CHECK(render_wilcoxon_table(a).empty());
    CHECK(render_markdown(a).find("GRNN") != std::string::npos);
    CHECK(without_timing(report_to_json(report_from_json(report_to_json(a)))) == without_timing(report_to_json(a)));
    CHECK(dataset_seed(5, 0) != dataset_seed(5, 1));
    CHECK(a.datasets[0].seed == dataset_seed(5, 0));
}

TEST_CASE("benchmark records cell failures instead of throwing") {
    auto splits = synthetic_splits(0.0);
    splits.resize(1);
    splits[0].train.clear();  // nothing to encode or train on
    BenchmarkOptions opt;
    opt.importance_repeats = 1;
    const auto report = run_benchmark(splits, quick_configs({ModelKind::mlp}), 1, opt);
    REQUIRE(report.cells.size() == 1);
    CHECK_FALSE(report.cells[0].ok);
    CHECK_FALSE(report.cells[0].error.empty());
    CHECK_THROWS_AS(run_benchmark(splits, std::vector<EstimatorConfig>{}, 1), ConfigError);
}
