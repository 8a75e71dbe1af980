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

#include "parity/adtest.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "parity/error.hpp"

namespace parity {
namespace {

struct CriticalRow {
    double alpha, b0, b1, b2;
};

// Interpolation coefficients of the critical values of T. The first five
// rows are the decision levels; the last two only extend the p-value curve
// down to the 0.001 floor.
constexpr std::array<CriticalRow, 7> kCriticalTable{{
    {0.25, 0.675, -0.245, -0.105},
    {0.10, 1.281, 0.250, -0.305},
    {0.05, 1.645, 0.678, -0.362},
    {0.025, 1.960, 1.149, -0.391},
    {0.01, 2.326, 1.822, -0.396},
    {0.005, 2.573, 2.364, -0.345},
    {0.001, 3.085, 3.615, -0.154},
}};

double critical_from_row(const CriticalRow& row, std::size_t k) {
    const auto m = static_cast<double>(k - 1);
    return row.b0 + row.b1 / std::sqrt(m) + row.b2 / m;
}

}  // namespace

std::string_view tie_mode_name(TieMode mode) noexcept {
    return mode == TieMode::midrank ? "midrank" : "continuous";
}

std::optional<TieMode> parse_tie_mode(std::string_view name) noexcept {
    if (name == "midrank") return TieMode::midrank;
    if (name == "continuous") return TieMode::continuous;
    return std::nullopt;
}

std::optional<double> tabulated_alpha(double alpha) noexcept {
    for (double a : kTabulatedAlphas) {
        if (std::abs(alpha - a) <= 1e-12) return a;
    }
    return std::nullopt;
}

double ad_null_variance(std::span<const std::size_t> group_sizes) {
    const auto k = static_cast<double>(group_sizes.size());
    std::vector<std::size_t> sizes(group_sizes.begin(), group_sizes.end());
    std::sort(sizes.begin(), sizes.end());
    std::size_t n_total = 0;
    double H = 0.0;
    for (std::size_t n : sizes) {
        n_total += n;
        H += 1.0 / static_cast<double>(n);
    }
    const auto N = static_cast<double>(n_total);

    // h = sum_{i=1}^{N-1} 1/i
    // g = sum_{i=1}^{N-2} sum_{j=i+1}^{N-1} 1/((N-i) j)
    //   = sum_{i=1}^{N-2} (h - h_i) / (N - i)
    double h = 0.0;
    for (std::size_t i = 1; i < n_total; ++i) h += 1.0 / static_cast<double>(i);
    double g = 0.0;
    double tail = h;  // sum_{j=i+1}^{N-1} 1/j, updated as i advances
    for (std::size_t i = 1; i + 1 < n_total; ++i) {
        tail -= 1.0 / static_cast<double>(i);
        g += tail / (N - static_cast<double>(i));
    }

    const double a = (4 * g - 6) * (k - 1) + (10 - 6 * g) * H;
    const double b = (2 * g - 4) * k * k + 8 * h * k + (2 * g - 14 * h - 4) * H - 8 * h +
                     4 * g - 6;
    const double c = (6 * h + 2 * g - 2) * k * k + (4 * h - 4 * g + 6) * k + (2 * h - 6) * H +
                     4 * h;
    const double d = (2 * h + 6) * k * k - 4 * h * k;
    return (a * N * N * N + b * N * N + c * N + d) / ((N - 1) * (N - 2) * (N - 3));
}

AdStatistic ad_statistic(std::span<const std::vector<double>> groups, TieMode tie_mode) {
    const std::size_t k = groups.size();
    if (k < 2) {
        throw DataError("AD test needs at least 2 groups, got " + std::to_string(k));
    }

    AdStatistic out;
    out.k = k;
    out.group_sizes.reserve(k);
    std::vector<std::pair<double, std::size_t>> pooled;
    for (std::size_t i = 0; i < k; ++i) {
        if (groups[i].empty()) {
            throw DataError("AD test: group " + std::to_string(i) + " is empty");
        }
        out.group_sizes.push_back(groups[i].size());
        for (double v : groups[i]) {
            if (!std::isfinite(v)) throw DataError("AD test: non-finite value");
            pooled.emplace_back(v, i);
        }
    }
    const std::size_t n_total = pooled.size();
    out.n_total = n_total;
    if (n_total < 4) {
        throw DataError("AD test needs a pooled sample of at least 4, got " +
                        std::to_string(n_total));
    }
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    if (pooled.front().first == pooled.back().first) {
        throw DataError("AD test: pooled sample is constant");
    }

    const auto N = static_cast<double>(n_total);
    std::vector<double> cum(k, 0.0);        // group counts strictly below the current value
    std::vector<double> run(k, 0.0);        // group counts at the current value
    std::vector<double> inner(k, 0.0);
    double below = 0.0;                     // pooled count strictly below

    for (std::size_t start = 0; start < n_total;) {
        std::size_t end = start;
        std::fill(run.begin(), run.end(), 0.0);
        while (end < n_total && pooled[end].first == pooled[start].first) {
            run[pooled[end].second] += 1.0;
            ++end;
        }
        const auto l = static_cast<double>(end - start);
        const bool last = end == n_total;

        if (tie_mode == TieMode::midrank) {
            const double b = below + l / 2.0;
            const double denom = b * (N - b) - N * l / 4.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double m = cum[i] + run[i] / 2.0;
                const double dev = N * m - static_cast<double>(out.group_sizes[i]) * b;
                inner[i] += l / N * dev * dev / denom;
            }
        } else if (!last) {
            const double b = below + l;
            const double denom = b * (N - b);
            for (std::size_t i = 0; i < k; ++i) {
                const double m = cum[i] + run[i];
                const double dev = N * m - static_cast<double>(out.group_sizes[i]) * b;
                inner[i] += l / N * dev * dev / denom;
            }
        }

        for (std::size_t i = 0; i < k; ++i) cum[i] += run[i];
        below += l;
        start = end;
    }

    // Per-group terms are summed in sorted order so the result does not
    // depend on the order the groups were listed in.
    std::vector<double> terms(k);
    for (std::size_t i = 0; i < k; ++i) {
        terms[i] = inner[i] / static_cast<double>(out.group_sizes[i]);
    }
    std::sort(terms.begin(), terms.end());
    double a2 = 0.0;
    for (double term : terms) a2 += term;
    if (tie_mode == TieMode::midrank) a2 *= (N - 1.0) / N;

    out.a2 = a2;
    out.sigma_n = std::sqrt(ad_null_variance(out.group_sizes));
    out.t = (a2 - static_cast<double>(k - 1)) / out.sigma_n;
    return out;
}

double ad_critical_value(double alpha, std::size_t k) {
    if (k < 2) throw UsageError("AD critical value needs k >= 2");
    const auto level = tabulated_alpha(alpha);
    if (!level) {
        throw UsageError("alpha " + std::to_string(alpha) +
                         " is not tabulated; use one of 0.25, 0.10, 0.05, 0.025, 0.01");
    }
    for (const auto& row : kCriticalTable) {
        if (row.alpha == *level) return critical_from_row(row, k);
    }
    throw UsageError("alpha not tabulated");
}

AdPValue ad_pvalue(double t, std::size_t k) {
    if (k < 2) throw UsageError("AD p-value needs k >= 2");
    std::array<double, kCriticalTable.size()> crit{};
    for (std::size_t i = 0; i < crit.size(); ++i) crit[i] = critical_from_row(kCriticalTable[i], k);

    if (t < crit.front()) return {kCriticalTable.front().alpha, false, true};
    if (t > crit.back()) return {kCriticalTable.back().alpha, true, false};

    for (std::size_t i = 0; i + 1 < crit.size(); ++i) {
        if (t == crit[i]) return {kCriticalTable[i].alpha, false, false};
        if (t < crit[i + 1]) {
            const double w = (t - crit[i]) / (crit[i + 1] - crit[i]);
            const double la = std::log(kCriticalTable[i].alpha);
            const double lb = std::log(kCriticalTable[i + 1].alpha);
            return {std::exp(la + w * (lb - la)), false, false};
        }
    }
    return {kCriticalTable.back().alpha, false, false};
}

AdTestResult ad_test(std::span<const std::vector<double>> groups, double alpha,
                     TieMode tie_mode) {
    const auto level = tabulated_alpha(alpha);
    if (!level) {
        throw UsageError("alpha " + std::to_string(alpha) +
                         " is not tabulated; use one of 0.25, 0.10, 0.05, 0.025, 0.01");
    }
    AdStatistic stat = ad_statistic(groups, tie_mode);
    const AdPValue p = ad_pvalue(stat.t, stat.k);

    AdTestResult r;
    r.a2 = stat.a2;
    r.sigma_n = stat.sigma_n;
    r.t = stat.t;
    r.k = stat.k;
    r.n_total = stat.n_total;
    r.group_sizes = std::move(stat.group_sizes);
    r.p_value = p.p;
    r.floored = p.floored;
    r.capped = p.capped;
    r.alpha = *level;
    r.critical_value = ad_critical_value(*level, r.k);
    r.reject = r.t >= r.critical_value;
    r.tie_mode = tie_mode;
    return r;
}

}  // namespace parity
