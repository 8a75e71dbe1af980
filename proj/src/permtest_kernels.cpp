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

#include "parity/permtest_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parity/rng.hpp"

namespace parity::kernels {
namespace {

// Relative variance (pooled variance is 1 after standardization) below which
// a group is treated as constant.
constexpr double kConstantVariance = 1e-12;
constexpr double kTieTolerance = 1e-10;

struct GroupMoments {
    double mean, m2, m3, m4;
};

GroupMoments central(const PowerSums& s, double n) noexcept {
    const double mu = s.s1 / n;
    const double e2 = s.s2 / n, e3 = s.s3 / n, e4 = s.s4 / n;
    const double mu2 = mu * mu;
    return {mu, e2 - mu2, e3 - 3.0 * mu * e2 + 2.0 * mu2 * mu,
            e4 - 4.0 * mu * e3 + 6.0 * mu2 * e2 - 3.0 * mu2 * mu2};
}

// Draws the subset for relabeling `index` into idx[0, m) by a partial
// Fisher-Yates shuffle, accumulates its sums, then undoes the swaps so idx is
// the identity again. The subset depends only on (seed, index).
PowerSums relabel(const PooledSample& sample, std::uint64_t seed, std::uint64_t index,
                  std::vector<std::uint32_t>& idx, std::vector<std::uint32_t>& swaps) {
    const std::size_t n = sample.size();
    const std::size_t m = sample.subset_size();
    SubstreamEngine rng(seed, index);
    for (std::size_t j = 0; j < m; ++j) {
        const auto r = static_cast<std::uint32_t>(j + rng.bounded(n - j));
        swaps[j] = r;
        std::swap(idx[j], idx[r]);
    }
    const PowerSums sums = sample.sum({idx.data(), m});
    for (std::size_t j = m; j-- > 0;) std::swap(idx[j], idx[swaps[j]]);
    return sums;
}

void tally(const PooledSample& sample, const Threshold& thr, const PowerSums& sums,
           Counts& counts) {
    const AssignmentDiffs perm = sample.diffs(sums);
    for (std::size_t s = 0; s < 4; ++s) {
        if (thr.active[s] && is_extreme(perm, thr, s)) ++counts[s];
    }
}

}  // namespace

PooledSample::PooledSample(std::span<const double> a, std::span<const double> b) {
    std::vector<double> first(a.begin(), a.end());
    std::vector<double> second(b.begin(), b.end());
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    if (second.size() < first.size() || (second.size() == first.size() && second < first)) {
        std::swap(first, second);
    }
    subset_size_ = first.size();
    canonical_ = std::move(first);
    canonical_.insert(canonical_.end(), second.begin(), second.end());

    const auto n = static_cast<long double>(canonical_.size());
    long double sum = 0.0L;
    for (double v : canonical_) sum += v;
    const long double mean = sum / n;
    long double ss = 0.0L;
    for (double v : canonical_) ss += (v - mean) * (v - mean);
    long double sd = std::sqrt(ss / n);
    if (!(sd > 0.0L)) sd = 1.0L;

    powers_.reserve(canonical_.size());
    for (double v : canonical_) {
        const auto z = static_cast<double>((v - mean) / sd);
        const double z2 = z * z;
        powers_.push_back({z, z2, z2 * z, z2 * z2});
        total_.s1 += z;
        total_.s2 += z2;
        total_.s3 += z2 * z;
        total_.s4 += z2 * z2;
    }
}

PowerSums PooledSample::sum(std::span<const std::uint32_t> entries) const noexcept {
    PowerSums s;
    for (std::uint32_t e : entries) {
        const auto& p = powers_[e];
        s.s1 += p[0];
        s.s2 += p[1];
        s.s3 += p[2];
        s.s4 += p[3];
    }
    return s;
}

PowerSums PooledSample::observed_sums() const noexcept {
    PowerSums s;
    for (std::size_t e = 0; e < subset_size_; ++e) {
        const auto& p = powers_[e];
        s.s1 += p[0];
        s.s2 += p[1];
        s.s3 += p[2];
        s.s4 += p[3];
    }
    return s;
}

AssignmentDiffs PooledSample::diffs(const PowerSums& subset) const noexcept {
    const auto na = static_cast<double>(subset_size_);
    const auto nb = static_cast<double>(powers_.size() - subset_size_);
    const PowerSums rest{total_.s1 - subset.s1, total_.s2 - subset.s2, total_.s3 - subset.s3,
                         total_.s4 - subset.s4};
    const GroupMoments ga = central(subset, na);
    const GroupMoments gb = central(rest, nb);

    AssignmentDiffs out;
    out.d[0] = std::abs(ga.mean - gb.mean);
    out.defined[0] = true;
    const bool spread_a = ga.m2 > kConstantVariance;
    const bool spread_b = gb.m2 > kConstantVariance;
    out.defined[1] = spread_a || spread_b;
    out.d[1] = std::abs(std::max(ga.m2, 0.0) - std::max(gb.m2, 0.0));
    const bool spread = spread_a && spread_b;
    out.defined[2] = out.defined[3] = spread;
    if (spread) {
        out.d[2] = std::abs(ga.m3 / (ga.m2 * std::sqrt(ga.m2)) -
                            gb.m3 / (gb.m2 * std::sqrt(gb.m2)));
        out.d[3] = std::abs(ga.m4 / (ga.m2 * ga.m2) - gb.m4 / (gb.m2 * gb.m2));
    }
    return out;
}

std::uint64_t PooledSample::content_hash() const noexcept {
    std::uint64_t h = fnv1a({reinterpret_cast<const unsigned char*>(canonical_.data()),
                             canonical_.size() * sizeof(double)});
    const std::uint64_t m = subset_size_;
    return fnv1a({reinterpret_cast<const unsigned char*>(&m), sizeof m}, h);
}

bool is_extreme(const AssignmentDiffs& perm, const Threshold& thr, std::size_t stat) noexcept {
    if (!perm.defined[stat]) return true;
    const double obs = thr.observed[stat];
    return perm.d[stat] >= obs - kTieTolerance * std::max(1.0, obs);
}

Counts count_extremes_serial(const PooledSample& sample, const Threshold& thr,
                             std::uint64_t permutations, std::uint64_t seed) {
    Counts counts{};
    std::vector<std::uint32_t> idx(sample.size());
    std::iota(idx.begin(), idx.end(), 0U);
    std::vector<std::uint32_t> swaps(sample.subset_size());
    for (std::uint64_t i = 0; i < permutations; ++i) {
        tally(sample, thr, relabel(sample, seed, i, idx, swaps), counts);
    }
    return counts;
}

Counts count_extremes_parallel(const PooledSample& sample, const Threshold& thr,
                               std::uint64_t permutations, std::uint64_t seed) {
    Counts counts{};
    const auto total = static_cast<std::int64_t>(permutations);
#pragma omp parallel
    {
        Counts local{};
        std::vector<std::uint32_t> idx(sample.size());
        std::iota(idx.begin(), idx.end(), 0U);
        std::vector<std::uint32_t> swaps(sample.subset_size());
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < total; ++i) {
            tally(sample, thr, relabel(sample, seed, static_cast<std::uint64_t>(i), idx, swaps),
                  local);
        }
#pragma omp critical(parity_permtest_counts)
        for (std::size_t s = 0; s < 4; ++s) counts[s] += local[s];
    }
    return counts;
}

Counts count_extremes_exhaustive(const PooledSample& sample, const Threshold& thr,
                                 std::uint64_t& assignments) {
    Counts counts{};
    assignments = 0;
    const std::size_t n = sample.size();
    const std::size_t m = sample.subset_size();
    std::vector<std::uint32_t> comb(m);
    std::iota(comb.begin(), comb.end(), 0U);
    while (true) {
        tally(sample, thr, sample.sum(comb), counts);
        ++assignments;
        // Advance to the next m-combination of [0, n) in lexicographic order.
        std::size_t i = m;
        while (i > 0 && comb[i - 1] == n - m + i - 1) --i;
        if (i == 0) break;
        ++comb[i - 1];
        for (std::size_t j = i; j < m; ++j) comb[j] = comb[j - 1] + 1;
    }
    return counts;
}

}  // namespace parity::kernels
