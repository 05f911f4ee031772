#pragma once

#include <cstdint>
#include <random>

#include "cfmimo/common.hpp"

namespace cfmimo {

/// Purposes for which independent random sub-streams are derived from a
/// parent seed. Values are part of the reproducibility contract: changing
/// them changes every stored result.
enum class Stream : std::uint64_t {
    Placement = 1,
    Shadowing = 2,
    Angles = 3,
    Training = 4,
    Bussgang = 5,
    Fading = 6,
    Pilots = 7,
    Noise = 8,
    Realization = 9,
    Trial = 10,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream purpose, std::uint64_t index = 0)
{
    return mix64(mix64(parent ^ mix64(static_cast<std::uint64_t>(purpose))) + mix64(index + 0x632be59bd9b4e019ULL));
}

/// Seeded random stream. Not thread-safe; give each thread its own.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return normal_(engine_); }

    /// Circularly symmetric CN(0, 1): real and imaginary parts N(0, 1/2).
    Complex complex_normal()
    {
        constexpr double s = 0.70710678118654752440;
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    CVec complex_normal_vector(Eigen::Index n)
    {
        CVec v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = complex_normal();
        return v;
    }

    CMat complex_normal_matrix(Eigen::Index rows, Eigen::Index cols)
    {
        CMat m(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
                m(r, c) = complex_normal();
        return m;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace cfmimo
