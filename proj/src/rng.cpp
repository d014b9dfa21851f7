// SPDX-License-Identifier: Apache-2.0
#include "housebot/rng.hpp"

#include <limits>

namespace housebot {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int Rng::uniform(int lo, int hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % range);
    std::uint64_t draw = engine_();
    while (draw >= limit)
        draw = engine_();
    return lo + static_cast<int>(draw % range);
}

} // namespace housebot
