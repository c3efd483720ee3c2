#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mhawkes {

/// SplitMix64 finalizer; expands one master seed into independent stream seeds.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of the i-th path derived from a master seed.
[[nodiscard]] constexpr std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x5851F42D4C957F2Dull));
}

/// Portable random source: mt19937_64 with hand-rolled transforms so that
/// draws are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Exponential variate with the given rate.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace mhawkes
