#include "memsar/rng.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace memsar::rng {

double standard_normal(std::uint64_t key) noexcept {
    const double u1 = to_unit(mix64(key));
    const double u2 = to_unit(mix64(key ^ 0xd1b54a32d192ed03ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Stream::below(std::size_t n) noexcept {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r = next();
    while (r >= limit) r = next();
    return static_cast<std::size_t>(r % n);
}

void shuffle(std::span<std::size_t> items, Stream& stream) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = stream.below(i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace memsar::rng
