#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace mtme {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Purpose tag mixed into every derived stream so that, e.g., evaluation #7 and
/// task #7 of the same run never share a generator state.
enum class StreamKind : std::uint64_t {
    coordinator = 1,
    evaluation = 2,
    task = 3,
    cvt = 4,
    constants = 5,
    uniform_tasks = 6,
};

/// Independent generator for (seed, kind, index). Streams for different
/// indices are decorrelated through splitmix64 before seeding.
inline Rng make_stream(std::uint64_t seed, StreamKind kind, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(kind));
    h = splitmix64(h ^ index);
    return Rng(h);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline std::vector<double> random_unit_vector(std::size_t dim, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace mtme
