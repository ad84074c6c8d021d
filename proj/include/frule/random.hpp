#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace frule {

// Seeded generator with portable sampling. std::mt19937_64's output sequence
// is fixed by the standard but the std distributions are not, so bounded
// draws and shuffles are done here to keep results identical across
// standard libraries.
class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % bound;
    }

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    // Moves a uniform sample of `count` items to the front (partial
    // Fisher-Yates); the remaining items are left in unspecified order.
    template <class T>
    void sample_front(std::span<T> items, std::size_t count) {
        for (std::size_t i = 0; i < count && i + 1 < items.size(); ++i) {
            const auto j = i + static_cast<std::size_t>(below(items.size() - i));
            std::swap(items[i], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace frule
