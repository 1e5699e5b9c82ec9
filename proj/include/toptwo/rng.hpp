#pragma once

#include <cstdint>

namespace toptwo {

// Splittable 64-bit generator (xoshiro256++ seeded through splitmix64).
// Streams derived from (seed, stream) are independent for all practical
// purposes, so Monte Carlo replications can be seeded as
// Rng::stream(experiment_seed, replication_index) and run in any order
// or thread without changing results.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    static Rng stream(std::uint64_t seed, std::uint64_t stream_index) {
        std::uint64_t x = seed;
        std::uint64_t a = splitmix64(x);
        std::uint64_t y = stream_index + 0x9e3779b97f4a7c15ULL;
        std::uint64_t b = splitmix64(y);
        return Rng(a ^ rotl(b, 17));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1); never returns 0 or 1, so inverse-cdf
    // transforms (log, tan, negative powers) stay finite.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer in {0, ..., n-1} via rejection-free Lemire reduction.
    std::uint64_t uniform_below(std::uint64_t n) {
        // 128-bit multiply-shift; bias < 2^-64, irrelevant for these sample sizes.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
};

} // namespace toptwo
