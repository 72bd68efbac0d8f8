#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace memsar::rng {

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive key derivation for counter-based streams.
constexpr std::uint64_t derive(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto p : parts) h = mix64(h ^ mix64(p));
    return h;
}

// Uniform in the open interval (0, 1) on a 2^-52 grid offset by half a step.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// One standard normal variate determined entirely by `key` (Box-Muller).
double standard_normal(std::uint64_t key) noexcept;

// Sequential generator for shuffles and initialization. Platform independent,
// unlike the standard distributions.
class Stream {
public:
    explicit Stream(std::uint64_t seed) noexcept : state_(mix64(seed)) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() noexcept { return to_unit(next()); }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept { return standard_normal(next()); }
    // Unbiased integer in [0, n).
    std::size_t below(std::size_t n) noexcept;

private:
    std::uint64_t state_;
};

// Fisher-Yates.
void shuffle(std::span<std::size_t> items, Stream& stream) noexcept;

}  // namespace memsar::rng
