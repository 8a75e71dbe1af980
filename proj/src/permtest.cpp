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

#include "parity/permtest.hpp"

#include <cmath>
#include <string>

#include "parity/error.hpp"
#include "parity/permtest_kernels.hpp"
#include "parity/rng.hpp"

namespace parity {
namespace {

std::optional<double> abs_diff(const std::optional<double>& x, const std::optional<double>& y) {
    if (!x || !y) return std::nullopt;
    return std::abs(*x - *y);
}

struct Prepared {
    ObservedDiffs observed;
    kernels::PooledSample pooled;
    kernels::Threshold threshold;
};

// Statistics undefined in either observed group are skipped, as are those the
// standardized kernel sees as degenerate.
Prepared prepare(std::span<const double> a, std::span<const double> b) {
    Prepared p{observed_diffs(a, b), kernels::PooledSample(a, b), {}};
    const kernels::AssignmentDiffs obs = p.pooled.diffs(p.pooled.observed_sums());
    for (std::size_t s = 0; s < 4; ++s) {
        p.threshold.active[s] = p.observed.diff[s].has_value() && obs.defined[s];
        p.threshold.observed[s] = obs.d[s];
    }
    return p;
}

PermutationResult skeleton(const Prepared& p, std::size_t n_a, std::size_t n_b) {
    PermutationResult r;
    r.n_a = n_a;
    r.n_b = n_b;
    r.moments_a = p.observed.a;
    r.moments_b = p.observed.b;
    r.observed_diff = p.observed.diff;
    for (std::size_t s = 0; s < 4; ++s) {
        if (!p.threshold.active[s]) r.observed_diff[s].reset();
    }
    return r;
}

}  // namespace

std::string_view statistic_name(Statistic s) noexcept {
    switch (s) {
    case Statistic::mean: return "mean";
    case Statistic::variance: return "variance";
    case Statistic::skewness: return "skewness";
    case Statistic::kurtosis: return "kurtosis";
    }
    return "unknown";
}

std::optional<std::uint64_t> binomial_capped(std::uint64_t n, std::uint64_t k,
                                             std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    uint128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;  // exact: c * (n-k+i) is divisible by i
        if (c > cap) return std::nullopt;
    }
    return static_cast<std::uint64_t>(c);
}

ObservedDiffs observed_diffs(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DataError("permutation test: empty sample");
    ObservedDiffs out{moment_set(a), moment_set(b), {}};
    at(out.diff, Statistic::mean) = std::abs(out.a.mean - out.b.mean);
    // A constant group has a defined variance of zero; the comparison only
    // degenerates when both groups are constant.
    if (out.a.skewness || out.b.skewness) {
        at(out.diff, Statistic::variance) = std::abs(out.a.variance - out.b.variance);
    }
    at(out.diff, Statistic::skewness) = abs_diff(out.a.skewness, out.b.skewness);
    at(out.diff, Statistic::kurtosis) = abs_diff(out.a.kurtosis, out.b.kurtosis);
    return out;
}

PermutationResult permutation_test(std::span<const double> a, std::span<const double> b,
                                   std::uint64_t permutations, std::uint64_t seed) {
    if (permutations < 1) throw UsageError("permutation test needs at least 1 permutation");
    const Prepared p = prepare(a, b);
    PermutationResult r = skeleton(p, a.size(), b.size());
    r.permutations = permutations;
    r.seed = seed;
    r.exact = false;

    const kernels::Counts counts =
        kernels::count_extremes_parallel(p.pooled, p.threshold, permutations, seed);
    for (std::size_t s = 0; s < 4; ++s) {
        if (!p.threshold.active[s]) continue;
        r.p_values[s] = static_cast<double>(1 + counts[s]) / static_cast<double>(1 + permutations);
    }
    return r;
}

PermutationResult exact_permutation_test(std::span<const double> a, std::span<const double> b,
                                         std::uint64_t max_assignments) {
    if (a.empty() || b.empty()) throw DataError("permutation test: empty sample");
    const auto total = binomial_capped(a.size() + b.size(), a.size(), max_assignments);
    if (!total) {
        throw UsageError("exact enumeration of C(" + std::to_string(a.size() + b.size()) + ", " +
                         std::to_string(a.size()) + ") assignments exceeds the limit of " +
                         std::to_string(max_assignments));
    }
    const Prepared p = prepare(a, b);
    PermutationResult r = skeleton(p, a.size(), b.size());
    std::uint64_t assignments = 0;
    const kernels::Counts counts =
        kernels::count_extremes_exhaustive(p.pooled, p.threshold, assignments);
    r.permutations = assignments;
    r.exact = true;
    for (std::size_t s = 0; s < 4; ++s) {
        if (!p.threshold.active[s]) continue;
        r.p_values[s] = static_cast<double>(counts[s]) / static_cast<double>(assignments);
    }
    return r;
}

}  // namespace parity
