#include "stacksent/random.hpp"

#include <cmath>
#include <numbers>

namespace stacksent {

double SplitMix64::normal() noexcept
{
    // Box-Muller, one variate per call.
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view tag, std::uint64_t a,
                          std::uint64_t b) noexcept
{
    std::uint64_t h = SplitMix64::mix(global_seed ^ fnv1a64(tag));
    h = SplitMix64::mix(h + 0x9E3779B97F4A7C15ULL * (a + 1));
    h = SplitMix64::mix(h + 0xD1B54A32D192ED03ULL * (b + 1));
    return h;
}

} // namespace stacksent
