#pragma once

#include <cstdint>

namespace q48 {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen for its tiny state and
// bit-exact behaviour on every platform; all randomness in the project
// flows through this generator so runs are reproducible from a seed.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound). Lemire's multiply-shift with rejection.
    uint32_t uniform_int(uint32_t bound) {
        uint32_t x = static_cast<uint32_t>(next_u64());
        uint64_t m = static_cast<uint64_t>(x) * bound;
        uint32_t low = static_cast<uint32_t>(m);
        if (low < bound) {
            uint32_t threshold = (0u - bound) % bound;
            while (low < threshold) {
                x = static_cast<uint32_t>(next_u64());
                m = static_cast<uint64_t>(x) * bound;
                low = static_cast<uint32_t>(m);
            }
        }
        return static_cast<uint32_t>(m >> 32);
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    uint64_t state() const { return state_; }

private:
    uint64_t state_;
};

// SplitMix64 finalizer as a standalone mixing function.
inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed for stream `index` of a master seed. Parallel games each get an
// independent stream so parallel runs reproduce serial ones.
inline uint64_t derive_stream(uint64_t master_seed, uint64_t index) {
    return mix64(master_seed ^ mix64(index + 0x632be59bd9b4e019ull));
}

} // namespace q48
