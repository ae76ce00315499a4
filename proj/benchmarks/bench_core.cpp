#include <benchmark/benchmark.h>

#include <vector>

#include "effortnn/dataset.hpp"
#include "effortnn/encoding.hpp"
#include "effortnn/estimators.hpp"
#include "effortnn/evaluation.hpp"
#include "effortnn/grnn.hpp"
#include "effortnn/mlp.hpp"
#include "effortnn/random.hpp"
#include "effortnn/stats.hpp"
#include "effortnn/synthetic.hpp"

using namespace effortnn;

namespace {

EncodedSplit first_band() {
    SyntheticSpec spec;
    spec.noise_dispersion = 0.1;
    const auto bands = band_by_productivity(filter_projects(generate_synthetic(spec), FilterSpec{}).records);
    return encode_features(chronological_split(bands.front()));
}

void BM_FitMlp(benchmark::State& state) {
    const auto data = first_band();
    Eigen::VectorXd y = data.train.targets;
    y = (y.array() - y.mean()) / 1000.0;
    for (auto _ : state) {
        RandomSource rng(1);
        benchmark::DoNotOptimize(fit_mlp(data.train.features, y, state.range(0), ScgConfig{}, rng, 1e-8));
    }
}
BENCHMARK(BM_FitMlp)->Arg(2)->Arg(8)->Arg(16);

void BM_TrainModel(benchmark::State& state) {
    const auto data = first_band();
    const auto kind = kAllModelKinds[static_cast<std::size_t>(state.range(0))];
    const auto config = EstimatorConfig::defaults(kind);
    for (auto _ : state) benchmark::DoNotOptimize(train(data.train, config));
    state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_TrainModel)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_GrnnPredict(benchmark::State& state) {
    RandomSource rng(2);
    const Eigen::Index n = state.range(0), d = 12;
    GrnnModel g{Eigen::MatrixXd(n, d), Eigen::VectorXd(n), Eigen::VectorXd::Constant(d, 0.7)};
    for (Eigen::Index i = 0; i < n; ++i) {
        g.targets(i) = rng.uniform(100, 10000);
        for (Eigen::Index j = 0; j < d; ++j) g.patterns(i, j) = rng.normal();
    }
    std::vector<double> q(static_cast<std::size_t>(d), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(g.predict(q));
}
BENCHMARK(BM_GrnnPredict)->Arg(100)->Arg(1000);

void BM_WilcoxonExact(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n), b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i] = (i % 3 == 0 ? -1.0 : 1.0) * static_cast<double>(i + 1);
    for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_signed_rank(a, b));
}
BENCHMARK(BM_WilcoxonExact)->Arg(12)->Arg(25)->Arg(86);

void BM_Kfold(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(kfold_indices(static_cast<std::size_t>(state.range(0)), 10, 7));
}
BENCHMARK(BM_Kfold)->Arg(200)->Arg(5000);

}  // namespace
BENCHMARK_MAIN();
