#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace effortnn {

/// Seeded random stream. The engine is mt19937_64, whose output sequence is
/// fixed by the standard; the distributions are implemented here rather than
/// taken from <random> so that draws are identical across standard libraries.
class RandomSource {
public:
    static constexpr std::string_view algorithm = "mt19937_64/splitmix64-split/box-muller";

    explicit RandomSource(std::uint64_t seed = 0);

    std::uint64_t seed() const noexcept { return seed_; }

    /// Independent child stream keyed by `stream`. Splitting is a pure
    /// function of (seed, stream) and does not advance this source.
    RandomSource split(std::uint64_t stream) const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Uniform integer on [0, n); unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t n);

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::optional<double> spare_normal_;
};

/// splitmix64 finalizer; also used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

}  // namespace effortnn
