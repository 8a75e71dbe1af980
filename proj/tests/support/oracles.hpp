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

// Independent reference computations used only by tests. None of these share
// code with the library paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "parity/moments.hpp"

namespace parity::oracle {

struct BruteMoments {
    long double mean, variance, skewness, kurtosis;
};

/// Direct evaluation of E[x], E[(x-mu)^2], E[((x-mu)/sigma)^3],
/// E[((x-mu)/sigma)^4] - 3 with population weights.
inline BruteMoments brute_moments(const std::vector<double>& x) {
    const long double n = static_cast<long double>(x.size());
    long double mu = 0;
    for (double v : x) mu += v;
    mu /= n;
    long double var = 0;
    for (double v : x) var += std::pow(static_cast<long double>(v) - mu, 2);
    var /= n;
    const long double sigma = std::sqrt(var);
    long double s3 = 0, s4 = 0;
    for (double v : x) {
        const long double z = (static_cast<long double>(v) - mu) / sigma;
        s3 += std::pow(z, 3);
        s4 += std::pow(z, 4);
    }
    return {mu, var, s3 / n, s4 / n - 3.0L};
}

struct BruteAd {
    double a2_midrank;
    double a2_continuous;
    double sigma_n;
};

/// k-sample AD by counting every group at every distinct value with a full
/// scan (O(N * L)), and the null variance with the double sum for g.
/// Tie-free data use the order-statistic form for the continuous statistic.
inline BruteAd brute_ad(const std::vector<std::vector<double>>& groups) {
    std::vector<double> pooled;
    for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
    std::vector<double> z = pooled;
    std::sort(z.begin(), z.end());
    const bool ties = std::adjacent_find(z.begin(), z.end()) != z.end();
    std::vector<double> distinct = z;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    const std::size_t k = groups.size();
    const double N = static_cast<double>(pooled.size());
    const auto count_in = [](const std::vector<double>& v, auto pred) {
        return static_cast<double>(std::count_if(v.begin(), v.end(), pred));
    };

    double mid = 0, cont = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double ni = static_cast<double>(groups[i].size());
        double mi = 0, ci = 0;
        for (std::size_t j = 0; j < distinct.size(); ++j) {
            const double zj = distinct[j];
            const double lj = count_in(pooled, [&](double v) { return v == zj; });
            const double below = count_in(pooled, [&](double v) { return v < zj; });
            const double fij = count_in(groups[i], [&](double v) { return v == zj; });
            const double mij_below = count_in(groups[i], [&](double v) { return v < zj; });
            const double ba = below + lj / 2;
            const double ma = mij_below + fij / 2;
            mi += lj / N * std::pow(N * ma - ni * ba, 2) / (ba * (N - ba) - N * lj / 4);
            if (ties && j + 1 < distinct.size()) {
                const double b = below + lj;
                const double m = mij_below + fij;
                ci += lj / N * std::pow(N * m - ni * b, 2) / (b * (N - b));
            }
        }
        if (!ties) {
            // Order statistics Z_(1..N-1); M_ij = #{group i values <= Z_(j)}.
            for (std::size_t j = 1; j < pooled.size(); ++j) {
                const double zj = z[j - 1];
                const double m = count_in(groups[i], [&](double v) { return v <= zj; });
                const double jj = static_cast<double>(j);
                ci += std::pow(N * m - jj * ni, 2) / (jj * (N - jj));
            }
            ci /= N;
        }
        mid += mi / ni;
        cont += ci / ni;
    }
    mid *= (N - 1) / N;

    const auto Ni = static_cast<std::size_t>(N);
    double H = 0, h = 0, g = 0;
    for (const auto& grp : groups) H += 1.0 / static_cast<double>(grp.size());
    for (std::size_t i = 1; i <= Ni - 1; ++i) h += 1.0 / static_cast<double>(i);
    for (std::size_t i = 1; i <= Ni - 2; ++i) {
        for (std::size_t j = i + 1; j <= Ni - 1; ++j) {
            g += 1.0 / ((N - static_cast<double>(i)) * static_cast<double>(j));
        }
    }
    const double kk = static_cast<double>(k);
    const double a = (4 * g - 6) * (kk - 1) + (10 - 6 * g) * H;
    const double b = (2 * g - 4) * kk * kk + 8 * h * kk + (2 * g - 14 * h - 4) * H - 8 * h +
                     4 * g - 6;
    const double c = (6 * h + 2 * g - 2) * kk * kk + (4 * h - 4 * g + 6) * kk +
                     (2 * h - 6) * H + 4 * h;
    const double d = (2 * h + 6) * kk * kk - 4 * h * kk;
    const double var = (a * N * N * N + b * N * N + c * N + d) / ((N - 1) * (N - 2) * (N - 3));
    return {mid, cont, std::sqrt(var)};
}

/// Exact permutation p-values by enumerating bitmasks over the original
/// (uncanonicalized) pooled vector and recomputing moment_set for each split.
/// Index 0..3 = mean, variance, skewness, kurtosis; empty when skipped.
inline std::array<std::optional<double>, 4> brute_exact_p(const std::vector<double>& a,
                                                          const std::vector<double>& b) {
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size();
    const std::size_t na = a.size();

    const auto diffs = [](const MomentSet& x, const MomentSet& y) {
        std::array<std::optional<double>, 4> d;
        d[0] = std::abs(x.mean - y.mean);
        if (x.skewness || y.skewness) d[1] = std::abs(x.variance - y.variance);
        if (x.skewness && y.skewness) {
            d[2] = std::abs(*x.skewness - *y.skewness);
            d[3] = std::abs(*x.kurtosis - *y.kurtosis);
        }
        return d;
    };
    const auto obs = diffs(moment_set(a), moment_set(b));

    std::array<double, 4> count{};
    double total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
        const auto d = diffs(moment_set(x), moment_set(y));
        total += 1;
        for (std::size_t s = 0; s < 4; ++s) {
            if (!obs[s]) continue;
            if (!d[s] || *d[s] >= *obs[s] - 1e-9 * std::max(1.0, *obs[s])) count[s] += 1;
        }
    }
    std::array<std::optional<double>, 4> p;
    for (std::size_t s = 0; s < 4; ++s) {
        if (obs[s]) p[s] = count[s] / total;
    }
    return p;
}

}  // namespace parity::oracle
