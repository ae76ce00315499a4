#include <algorithm>
#include <numeric>

#include "effortnn/error.hpp"
#include "effortnn/estimators.hpp"
#include "effortnn/evaluation.hpp"
#include "effortnn/random.hpp"

namespace effortnn {

SignificanceRanking rank_importances(std::vector<FieldImportance> scores) {
    std::sort(scores.begin(), scores.end(), [](const FieldImportance& a, const FieldImportance& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.field < b.field;
    });
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i].rank = static_cast<int>(i + 1);
    return scores;
}

SignificanceRanking permutation_importance(const EstimatorModel& model, const DesignMatrix& data, int repeats,
                                           std::uint64_t seed) {
    if (data.rows() == 0) throw DomainError("permutation_importance: no rows");
    if (repeats < 1) throw DomainError("permutation_importance: repeats must be >= 1");

    const auto actual = values_of(data.targets);
    const Eigen::VectorXd base_pred = predicted_effort(predict(model, data.features));
    const double base = mar(actual, values_of(base_pred));

    const RandomSource root(seed);
    const auto blocks = model.schema.blocks();
    std::vector<FieldImportance> scores;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(data.rows()));
    for (std::size_t f = 0; f < blocks.size(); ++f) {
        const auto& block = blocks[f];
        double total = 0.0;
        for (int r = 0; r < repeats; ++r) {
            std::iota(order.begin(), order.end(), Eigen::Index{0});
            auto rng = root.split(f).split(static_cast<std::uint64_t>(r));
            rng.shuffle(std::span<Eigen::Index>(order));
            Eigen::MatrixXd permuted = data.features;
            for (Eigen::Index i = 0; i < data.rows(); ++i) {
                permuted.block(i, block.start, 1, block.width) =
                    data.features.block(order[static_cast<std::size_t>(i)], block.start, 1, block.width);
            }
            const Eigen::VectorXd pred = predicted_effort(predict(model, permuted));
            total += mar(actual, values_of(pred)) - base;
        }
        scores.push_back({block.field, total / repeats, 0});
    }
    return rank_importances(std::move(scores));
}

}  // namespace effortnn
