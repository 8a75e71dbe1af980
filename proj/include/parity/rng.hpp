/*
 * Copyright 2026 The parity-audit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace parity {

__extension__ typedef unsigned __int128 uint128;

/// SplitMix64 finalizer. Used both as the seed mixer and as the generator
/// step of SubstreamEngine.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of substream `index` of `master`. Substreams are addressable by
/// counter, so any subset of them can be regenerated in isolation.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master) ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// FNV-1a over raw bytes, for deriving seeds from content.
constexpr std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                              std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator and is cheap
/// to construct, so one instance per permutation is affordable.
class SubstreamEngine {
public:
    using result_type = std::uint64_t;

    explicit constexpr SubstreamEngine(std::uint64_t seed) noexcept : state_(seed) {}
    constexpr SubstreamEngine(std::uint64_t master, std::uint64_t index) noexcept
        : state_(substream_seed(master, index)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform integer in [0, bound) by Lemire's multiply-and-reject.
    /// Portable, unlike std::uniform_int_distribution.
    std::uint64_t bounded(std::uint64_t bound) noexcept {
        uint128 m = static_cast<uint128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<uint128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace parity
