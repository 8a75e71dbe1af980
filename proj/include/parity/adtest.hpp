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
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace parity {

/// k-sample Anderson-Darling test (Scholz & Stephens).
///
/// `continuous` is the right-continuous form, which assumes no ties;
/// `midrank` is the tie-aware form using half-step cumulative counts at tied
/// values. Both reduce to the same statistic up to a factor (N-1)/N on
/// tie-free data.
enum class TieMode { continuous, midrank };

std::string_view tie_mode_name(TieMode mode) noexcept;
std::optional<TieMode> parse_tie_mode(std::string_view name) noexcept;

/// Significance levels with a published critical-value fit. Only these may
/// be used for a reject/fail-to-reject decision.
inline constexpr std::array<double, 5> kTabulatedAlphas{0.25, 0.10, 0.05, 0.025, 0.01};

/// Returns the canonical tabulated level equal to `alpha` (within 1e-12), or
/// nothing if `alpha` is not tabulated.
std::optional<double> tabulated_alpha(double alpha) noexcept;

struct AdStatistic {
    double a2 = 0.0;       // A^2_kN
    double sigma_n = 0.0;  // null standard deviation of A^2_kN
    double t = 0.0;        // (A^2 - (k-1)) / sigma_n
    std::size_t k = 0;
    std::size_t n_total = 0;
    std::vector<std::size_t> group_sizes;
};

struct AdPValue {
    double p = 0.0;
    bool floored = false;  // true p is below 0.001
    bool capped = false;   // true p is above 0.25
};

struct AdTestResult {
    double a2 = 0.0;
    double sigma_n = 0.0;
    double t = 0.0;
    std::size_t k = 0;
    std::size_t n_total = 0;
    std::vector<std::size_t> group_sizes;
    double p_value = 0.0;
    bool floored = false;
    bool capped = false;
    double alpha = 0.0;
    double critical_value = 0.0;
    bool reject = false;
    TieMode tie_mode = TieMode::midrank;
};

/// Null variance of A^2_kN for k groups with the given sizes.
double ad_null_variance(std::span<const std::size_t> group_sizes);

/// Throws DataError when k < 2, a group is empty, N < 4, the pooled sample
/// is constant, or a value is non-finite.
AdStatistic ad_statistic(std::span<const std::vector<double>> groups,
                         TieMode tie_mode = TieMode::midrank);

/// Critical value of the standardized statistic T with m = k - 1 degrees of
/// freedom at a tabulated level: b0 + b1/sqrt(m) + b2/m. Throws UsageError
/// for untabulated levels or k < 2.
double ad_critical_value(double alpha, std::size_t k);

/// Approximate p-value of T; log(alpha) is interpolated linearly in T between
/// the critical values and clamped to [0.001, 0.25].
AdPValue ad_pvalue(double t, std::size_t k);

/// Full test. The verdict compares T against the critical value directly.
AdTestResult ad_test(std::span<const std::vector<double>> groups, double alpha,
                     TieMode tie_mode = TieMode::midrank);

}  // namespace parity
