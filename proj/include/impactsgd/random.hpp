#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace impactsgd {

/// splitmix64 finalizer. Used to derive independent sub-stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a hash of a stream label such as "benchmark" or "sgd/adam".
std::uint64_t label_hash(std::string_view label) noexcept;

/// Seed of sub-stream `stream` under `master`. Distinct streams give
/// statistically independent generators; the mapping is fixed forever.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;

/// Seedable random source with a frozen Gaussian transform.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Uniforms use the top 53 bits shifted to the open interval
/// (0, 1). Normals use the Box-Muller transform, returning the cosine
/// branch first and caching the sine branch for the next call.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept;
    double gaussian() noexcept;
    double gaussian(double stddev) noexcept { return stddev * gaussian(); }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace impactsgd
