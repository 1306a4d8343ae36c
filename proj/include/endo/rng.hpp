#pragma once

#include <cstdint>

namespace endo {

// splitmix64 finalizer: bijective 64-bit mix with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based stream: every draw is a pure function of (seed, key path, counter),
// so scenario s of replication m reproduces identically regardless of evaluation
// order, and disjoint key paths give independent streams.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(mix64(seed ^ 0x5DEECE66DB1DACF3ull)) {}

    // Derive an independent child stream for a sub-entity (replication, scenario,
    // element, ...). Chaining sub() calls walks a key path.
    RngStream sub(std::uint64_t key) const {
        RngStream r = *this;
        r.state_ = mix64(state_ + 0x9E3779B97F4A7C15ull * (key + 1));
        return r;
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix64(state_ + 0xD1B54A32D192ED03ull * (counter + 1));
    }

    // Uniform in [0, 1), 53-bit resolution.
    double u01(std::uint64_t counter) const { return (bits(counter) >> 11) * 0x1.0p-53; }

    // Uniform strictly inside (0, 1): safe for quantile transforms.
    double u01_open(std::uint64_t counter) const {
        return ((bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

// Reserved key so the candidate-evaluation sample never collides with a
// training replication (training replications use their 0-based index).
constexpr std::uint64_t kEvaluationStreamKey = 0xFFFFFFFFull;

}  // namespace endo
