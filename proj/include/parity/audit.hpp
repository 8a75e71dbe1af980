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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parity/adtest.hpp"
#include "parity/metrics.hpp"
#include "parity/moments.hpp"
#include "parity/permtest.hpp"

namespace parity {

/// Multiple-comparison correction over the (pairs x statistics) family.
enum class Correction { none, holm, bonferroni };

std::string_view correction_name(Correction c) noexcept;
std::optional<Correction> parse_correction(std::string_view name) noexcept;

/// Separator used when joining label columns into intersectional labels.
inline constexpr std::string_view kIntersectSeparator = "|";

struct Group {
    std::string label;
    std::vector<double> values;
};

/// Errors split by sensitive-group label. Groups are ordered by label.
struct GroupedErrors {
    std::vector<Group> groups;
    ErrorMetric metric = ErrorMetric::difference;
    std::vector<std::string> warnings;

    std::size_t total() const noexcept;
    std::vector<std::vector<double>> samples() const;
};

struct AuditConfig {
    ErrorMetric metric = ErrorMetric::percentage;
    double alpha = 0.01;
    std::uint64_t permutations = 100'000;
    std::uint64_t seed = 42;
    TieMode tie_mode = TieMode::midrank;
    std::size_t min_group_size = 10;
    Correction correction = Correction::none;
};

/// Throws UsageError for an untabulated alpha, zero permutations or a zero
/// minimum group size.
void validate(const AuditConfig& config);

struct GroupSummary {
    std::string label;
    std::size_t size = 0;
    MomentSet moments;
    double mean_abs_error = 0.0;
    double abs_error_sd = 0.0;
};

struct PosthocPair {
    PermutationResult test;
    /// p-values after correction (equal to the raw ones for Correction::none).
    PerStatistic<std::optional<double>> adjusted;
    PerStatistic<bool> significant{};
};

enum class Verdict { fair, unfair };

std::string_view verdict_name(Verdict v) noexcept;

struct AuditReport {
    AuditConfig config;
    std::vector<GroupSummary> groups;
    AdTestResult ad;
    Verdict verdict = Verdict::fair;
    /// Non-empty exactly when verdict == unfair.
    std::vector<PosthocPair> posthoc;
    std::vector<std::string> warnings;
};

/// Stable partition of `errors` by `labels`. Groups smaller than
/// `min_group_size` are dropped with a warning. Throws DataError on a length
/// mismatch or when no group survives.
GroupedErrors partition_errors(const ErrorVector& errors, std::span<const std::string> labels,
                               std::size_t min_group_size = 1);

/// Element-wise join of label columns with kIntersectSeparator.
std::vector<std::string> intersect_labels(std::span<const std::vector<std::string>> columns);

/// Seed for the post hoc test of one pair: a function of the master seed and
/// the pair's pooled content only, so it is independent of label names, of
/// argument order, and of which other groups are present.
std::uint64_t pair_seed(std::uint64_t master, std::span<const double> a,
                        std::span<const double> b);

/// Adjusts the defined entries of `p`, leaving empty entries empty.
std::vector<std::optional<double>> adjust_pvalues(std::span<const std::optional<double>> p,
                                                  Correction correction);

/// Two-stage audit: omnibus AD test, then pairwise permutation tests for all
/// group pairs only if the AD test rejects.
AuditReport run_audit(std::span<const double> pred, std::span<const double> truth,
                      std::span<const std::string> labels, const AuditConfig& config);

/// Same, from a precomputed error vector (custom metrics).
AuditReport run_audit(const ErrorVector& errors, std::span<const std::string> labels,
                      const AuditConfig& config);

AuditReport run_audit(const GroupedErrors& grouped, const AuditConfig& config);

}  // namespace parity
