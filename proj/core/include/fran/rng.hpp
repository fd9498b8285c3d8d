#pragma once

#include <cstdint>
#include <random>

namespace fran {

using Rng = std::mt19937_64;

/// splitmix64 finaliser; used to derive independent stream seeds from a
/// master seed so that adding a stream never perturbs the others.
constexpr std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0)
{
    return mix_seed(mix_seed(master ^ mix_seed(stream)) + index);
}

/// Bernoulli draw that is exact at p = 0 and p = 1.
inline bool bernoulli(Rng& rng, double p)
{
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

} // namespace fran
