#pragma once

#include <cstdint>

namespace rnnbo {

// Cheap deterministic stream separation (splitmix64 increment).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
}

} // namespace rnnbo
