#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mgcc {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for a named stream, derived from the master seed and a stable id
/// (FNV-1a of the id mixed through splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_id) noexcept;

/// mt19937_64 with distribution transforms written out by hand: the standard
/// distributions are implementation-defined, and traces must be reproducible
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    double exponential(double mean) noexcept;

private:
    std::mt19937_64 engine_;
};

}  // namespace mgcc
