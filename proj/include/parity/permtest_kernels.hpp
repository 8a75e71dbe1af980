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

// Inner loops of the permutation test. Each relabeling loop exists twice:
// a plain serial reference and an OpenMP version. Both must produce
// identical counts for any thread count; tests and bench/ compare them.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace parity::kernels {

struct PowerSums {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
};

/// Per-statistic absolute group differences of one assignment.
struct AssignmentDiffs {
    std::array<double, 4> d{};
    std::array<bool, 4> defined{};
};

/// Two samples pooled in canonical order (smaller, then lexicographically
/// smaller, sorted sample first) and standardized by the pooled mean and
/// standard deviation. The first `subset_size()` entries are the observed
/// first group; relabelings choose which entries form that group.
class PooledSample {
public:
    PooledSample(std::span<const double> a, std::span<const double> b);

    std::size_t size() const noexcept { return powers_.size(); }
    std::size_t subset_size() const noexcept { return subset_size_; }
    const PowerSums& total() const noexcept { return total_; }

    /// Sums over the given entries.
    PowerSums sum(std::span<const std::uint32_t> entries) const noexcept;
    /// Sums over the observed first group.
    PowerSums observed_sums() const noexcept;
    /// Diffs between the subset described by `subset` and its complement.
    AssignmentDiffs diffs(const PowerSums& subset) const noexcept;

    /// Hash of the canonical pooled content; equal for (a, b) and (b, a).
    std::uint64_t content_hash() const noexcept;

private:
    std::vector<std::array<double, 4>> powers_;
    std::vector<double> canonical_;
    std::size_t subset_size_ = 0;
    PowerSums total_;
};

/// Which statistics to count, and the observed values to compare against.
struct Threshold {
    std::array<double, 4> observed{};
    std::array<bool, 4> active{};
};

using Counts = std::array<std::uint64_t, 4>;

/// d* counts as extreme if it is undefined or not smaller than the observed
/// value up to a 1e-10 relative rounding allowance.
bool is_extreme(const AssignmentDiffs& perm, const Threshold& thr, std::size_t stat) noexcept;

Counts count_extremes_serial(const PooledSample& sample, const Threshold& thr,
                             std::uint64_t permutations, std::uint64_t seed);
Counts count_extremes_parallel(const PooledSample& sample, const Threshold& thr,
                               std::uint64_t permutations, std::uint64_t seed);

/// Enumerates every subset of size subset_size() in lexicographic order.
/// Returns the counts; `assignments` receives the number enumerated.
Counts count_extremes_exhaustive(const PooledSample& sample, const Threshold& thr,
                                 std::uint64_t& assignments);

}  // namespace parity::kernels
