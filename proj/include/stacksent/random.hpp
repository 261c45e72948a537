#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace stacksent {

// splitmix64 generator. next() advances the state by the golden-ratio
// increment and returns the mixed state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform integer in [0, bound) by rejection on the top of the range.
    std::uint64_t uniform(std::uint64_t bound) noexcept
    {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double normal() noexcept;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// Seed of a named stream: mixes the global seed, a purpose tag and up to two
// integer coordinates (fold, member, ...).
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view tag, std::uint64_t a = 0,
                          std::uint64_t b = 0) noexcept;

// Fisher-Yates: for i from n-1 down to 1 swap items[i] with items[uniform(i+1)].
template <typename T>
void shuffle(std::span<T> items, SplitMix64& rng)
{
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

} // namespace stacksent
