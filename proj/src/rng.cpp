#include "spectest/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace spectest {

namespace {

// splitmix64 finalizer; full-period mixing of the 64-bit state.
std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

double RngEngine::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngEngine::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

double RngEngine::logistic(bool standardized) {
    double u = uniform01();
    while (u <= 0.0 || u >= 1.0) u = uniform01();
    const double x = std::log(u / (1.0 - u));
    // raw variance pi^2/3
    return standardized ? x / 1.8137993642342178 : x;
}

double RngEngine::double_exponential(bool standardized) {
    double u = uniform01();
    while (u <= 0.0 || u >= 1.0) u = uniform01();
    const double v = u - 0.5;
    const double x = (v < 0.0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::fabs(v));
    // raw variance 2
    return standardized ? x / 1.4142135623730951 : x;
}

int RngEngine::uniform_int(int upper) {
    if (upper <= 0) throw std::invalid_argument("uniform_int: upper must be positive");
    const auto bound = static_cast<std::uint64_t>(upper);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<int>(x % bound);
}

} // namespace spectest
