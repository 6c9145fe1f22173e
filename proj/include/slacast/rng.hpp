#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace slacast {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// xoshiro256** seeded through splitmix64. Every transform below is defined
/// here rather than through <random> distributions so sequences are the same
/// on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream derived from (seed, name). Adding a stream never
    /// perturbs the draws of another one.
    static Rng stream(std::uint64_t seed, std::string_view name);

    std::uint64_t next();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller, one value per call).
    double normal();
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t s_[4];
};

}  // namespace slacast
