#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace aqm {

/// Seeded random stream.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// performs every conversion (uniform doubles, bounded integers, sampling)
/// here rather than through <random> distributions, whose algorithms are
/// implementation-defined. Any stream can therefore be replayed bit-exactly
/// by an independent implementation of the engine.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Index drawn from an unnormalized nonnegative weight vector by inverse CDF.
    std::size_t categorical(std::span<const double> weights);

    /// k distinct values from [0, n), in draw order (partial Fisher-Yates).
    std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k);

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer. Used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for child stream `index` of `parent`; a pure function of both.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

}  // namespace aqm
