#pragma once

#include <cstdint>
#include <random>

namespace spectest {

/// Derives a statistically independent child seed from a master seed, so that
/// parallel work units (replications, randomization draws) can own private
/// generators and results do not depend on scheduling.
[[nodiscard]] std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Seeded random engine with the sampling transforms used throughout the
/// library. The engine is std::mt19937_64 (bit-exact output mandated by the
/// standard) and all distribution transforms are implemented here, so streams
/// are reproducible across standard library implementations.
class RngEngine {
public:
    explicit RngEngine(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    [[nodiscard]] double uniform01();

    /// Standard normal via the Box-Muller transform.
    [[nodiscard]] double normal();

    /// Logistic draw; when standardized, scaled to unit variance
    /// (raw variance pi^2/3).
    [[nodiscard]] double logistic(bool standardized = true);

    /// Double-exponential (Laplace) draw; when standardized, scaled to unit
    /// variance (raw variance 2).
    [[nodiscard]] double double_exponential(bool standardized = true);

    /// Uniform integer in {0, ..., upper-1} via rejection sampling.
    [[nodiscard]] int uniform_int(int upper);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace spectest
