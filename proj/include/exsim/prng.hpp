// SPDX-License-Identifier: Apache-2.0
// Deterministic bit source for Rand inputs and retired Free bindings.
//
// Bits are a pure function of (seed, stream, bit ordinal, cycle) so identical
// seeds reproduce identical runs regardless of action scheduling. Stream 0
// feeds Rand-tagged inputs, stream 1 feeds step-free bindings.

#pragma once

#include <cstdint>

namespace exsim {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline bool seeded_bit(uint64_t seed, uint32_t stream, uint32_t ordinal, int64_t cycle) {
    uint64_t key = (static_cast<uint64_t>(stream) << 56) ^
                   (static_cast<uint64_t>(ordinal) << 32) ^ static_cast<uint64_t>(cycle);
    return splitmix64(seed ^ splitmix64(key)) & 1;
}

} // namespace exsim
