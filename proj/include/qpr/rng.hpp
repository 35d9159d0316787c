#pragma once

#include <cstdint>
#include <random>

namespace qpr {

// SplitMix64 finalizer; maps (seed, stream) pairs to well-separated seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// mt19937_64 with portable uniform and normal draws. The standard
// distribution adaptors are implementation-defined, so the conversions are
// done here to keep streams identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // [0, 1) with 53 random bits.
    double uniform();
    // Standard normal (Box-Muller).
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qpr
