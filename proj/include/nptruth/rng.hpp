#pragma once

#include <cstdint>

namespace nptruth {

// Counter-based pseudo-random stream (splitmix64 finalizer over a keyed
// counter). Streams with distinct (seed, stream_id) pairs are statistically
// independent for desk-scale work, and a stream's output depends only on
// (seed, stream_id, number of draws), so replicates are reproducible no
// matter how work is scheduled across threads.
//
// Each stream has a single owner; the type is cheap to copy but a copy
// replays the same draws, so hand workers their own stream_id instead.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(stream_id + 0xD1B54A32D192ED03ull))),
          counter_(0) {}

    std::uint64_t seed_key() const { return key_; }
    std::uint64_t draws() const { return counter_; }

    std::uint64_t next_u64() { return mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ull); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on the open interval (0, 1); safe to feed through quantile
    // transforms.
    double open01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace nptruth
