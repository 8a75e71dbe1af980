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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "parity/moments.hpp"

namespace parity {

enum class Statistic { mean = 0, variance = 1, skewness = 2, kurtosis = 3 };

inline constexpr std::array<Statistic, 4> kStatistics{
    Statistic::mean, Statistic::variance, Statistic::skewness, Statistic::kurtosis};

std::string_view statistic_name(Statistic s) noexcept;

/// One value per statistic, indexed by Statistic.
template <typename T>
using PerStatistic = std::array<T, 4>;

template <typename T>
constexpr T& at(PerStatistic<T>& a, Statistic s) noexcept {
    return a[static_cast<std::size_t>(s)];
}
template <typename T>
constexpr const T& at(const PerStatistic<T>& a, Statistic s) noexcept {
    return a[static_cast<std::size_t>(s)];
}

inline constexpr std::uint64_t kDefaultMaxAssignments = 1'000'000;

struct ObservedDiffs {
    MomentSet a;
    MomentSet b;
    /// |s(a) - s(b)|; empty when the statistic is undefined in either sample.
    PerStatistic<std::optional<double>> diff;
};

struct PermutationResult {
    std::string group_a;
    std::string group_b;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    MomentSet moments_a;
    MomentSet moments_b;
    PerStatistic<std::optional<double>> observed_diff;
    /// Empty exactly for skipped statistics.
    PerStatistic<std::optional<double>> p_values;
    std::uint64_t permutations = 0;
    std::uint64_t seed = 0;
    bool exact = false;

    bool skipped(Statistic s) const { return !at(p_values, s).has_value(); }
};

/// Throws DataError on an empty sample.
ObservedDiffs observed_diffs(std::span<const double> a, std::span<const double> b);

/// Randomized two-sample permutation test on the four moments. All four
/// statistics share one relabeling stream; relabeling i is drawn from
/// substream i of `seed`, so the result does not depend on the thread count.
/// p = (1 + #{d* >= d}) / (1 + l), where a relabeling that leaves a statistic
/// undefined in either group counts as extreme. The pair is canonicalized
/// first, so swapping `a` and `b` gives identical p-values.
PermutationResult permutation_test(std::span<const double> a, std::span<const double> b,
                                   std::uint64_t permutations, std::uint64_t seed);

/// Full enumeration over all C(n_a + n_b, n_a) assignments, p = #{d* >= d} / total.
/// Throws UsageError if the count would exceed `max_assignments`.
PermutationResult exact_permutation_test(std::span<const double> a, std::span<const double> b,
                                         std::uint64_t max_assignments = kDefaultMaxAssignments);

/// C(n, k), or empty if it exceeds `cap`.
std::optional<std::uint64_t> binomial_capped(std::uint64_t n, std::uint64_t k,
                                             std::uint64_t cap);

}  // namespace parity
