#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace nsdde {

// SplitMix64 (Steele, Lea, Flood 2014): a counter-based 64-bit generator.
// The state is an affine counter advanced by the golden-ratio increment;
// each output is a bijective mix of the counter, so distinct states never
// collide within a stream. Streams are derived from (base_seed, stream_id)
// by double-mixing, which keeps parallel Monte Carlo paths independent and
// reproducible: stream(s, i) is a pure function of its arguments.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static SplitMix64 stream(std::uint64_t base_seed, std::uint64_t stream_id) {
        // Decorrelate the stream id from the seed before combining so that
        // (s, i) and (s+1, i-1) do not land on the same counter.
        return SplitMix64(mix(base_seed) ^ mix(stream_id + 0x632BE59BD9B4E019ULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normals via Box-Muller. Pairs of uniforms produce pairs of
    // normals; an odd count discards the spare sine value, so each call
    // consumes exactly 2*ceil(out.size()/2) uniform draws regardless of
    // history. No state is cached across calls.
    void fill_gaussian(std::span<double> out) {
        std::size_t i = 0;
        while (i < out.size()) {
            const double u1 = next_unit();
            const double u2 = next_unit();
            const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
            const double angle = 2.0 * std::numbers::pi * u2;
            out[i++] = radius * std::cos(angle);
            if (i < out.size()) {
                out[i++] = radius * std::sin(angle);
            }
        }
    }

    double next_gaussian() {
        double z;
        fill_gaussian(std::span<double>(&z, 1));
        return z;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace nsdde
