#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sirhawkes {

// splitmix64 finalizer; used to derive independent stream seeds.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seedable generator whose substreams are addressed by (seed, index, lane).
// Streams for different indices are independent of the order in which
// they are created, so batches can run in any order or in parallel.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    [[nodiscard]] static Rng stream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) {
        return Rng(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL)) ^ mix64(lane * 0x8cb92ba72f3d8dd7ULL + 1));
    }

    // Uniform on the open interval (0, 1) with 53-bit resolution.
    [[nodiscard]] double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unit-rate exponential.
    [[nodiscard]] double exponential() { return -std::log(uniform()); }

    [[nodiscard]] std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n).
    [[nodiscard]] std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace sirhawkes
