#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace replisim {

// Recorded in run metadata so any result can be replayed.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 (substreams: splitmix64; bounded ints: multiply-shift rejection; "
    "normal: box-muller)";

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Whitens (master_seed, stream) into an independent substream seed. Replicates,
// bootstrap rounds and trials each get their own stream so aggregation order
// never affects the drawn values.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t s = master_seed;
    std::uint64_t whitened = splitmix64_next(s);
    s = whitened + stream * 0x9e3779b97f4a7c15ULL;
    return splitmix64_next(s);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n) via Lemire's multiply-shift rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // 53-bit uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe as a log argument.
    double uniform01_open_zero() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Box-Muller, cosine branch only: exactly two draws per call.
    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = uniform01_open_zero();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * std::numbers::pi * u2);
        return mean + stddev * z;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace replisim
