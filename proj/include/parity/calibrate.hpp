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
#include <string_view>
#include <vector>

#include "parity/adtest.hpp"
#include "parity/permtest.hpp"

namespace parity {

/// Standardized families; a draw is location + scale * variate where the
/// variate is
///   normal     N(0, 1)
///   lognormal  exp(shape * N(0, 1)), shape defaults to 0.5
///   uniform    U(-sqrt(3), sqrt(3)) (unit variance)
///   student_t  t(shape), shape (degrees of freedom) defaults to 5
enum class Family { normal, lognormal, uniform, student_t };

std::string_view family_name(Family f) noexcept;
std::optional<Family> parse_family(std::string_view name) noexcept;

struct GroupGenerator {
    Family family = Family::normal;
    double location = 0.0;
    double scale = 1.0;
    std::optional<double> shape;
    std::size_t size = 0;
};

struct GeneratorSpec {
    std::vector<GroupGenerator> groups;

    /// k groups of n from `family`; only the last group is shifted by `shift`.
    static GeneratorSpec shifted(Family family, std::size_t k, std::size_t n, double shift,
                                 double scale = 1.0, std::optional<double> shape = std::nullopt);
};

/// Throws UsageError for a non-positive scale or shape, an empty group, or
/// fewer than two groups.
void validate(const GeneratorSpec& spec);

/// Draws one synthetic data set; group g of trial seed `seed` comes from its
/// own substream so groups are reproducible independently.
std::vector<std::vector<double>> draw_groups(const GeneratorSpec& spec, std::uint64_t seed);

struct TrialRecord {
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    bool reject = false;
    double a2 = 0.0;
    double t = 0.0;
    double p_value = 0.0;
    /// Raw post hoc p-values of every pair, empty when the AD test did not reject.
    std::vector<PerStatistic<std::optional<double>>> posthoc;
};

struct CalibrationResult {
    double rate = 0.0;
    std::size_t rejections = 0;
    std::vector<TrialRecord> log;
};

/// Runs `trials` seeded audits on fresh synthetic data and reports the AD
/// rejection rate. Trial i uses substream i of `seed`. Throws UsageError when
/// trials == 0 or the generator or alpha is invalid.
CalibrationResult simulate_rejection_rate(const GeneratorSpec& spec, std::size_t trials,
                                          double alpha, std::uint64_t permutations,
                                          std::uint64_t seed,
                                          TieMode tie_mode = TieMode::midrank);

/// Same trials run one after another; kept as the reference for the
/// OpenMP version.
CalibrationResult simulate_rejection_rate_serial(const GeneratorSpec& spec, std::size_t trials,
                                                 double alpha, std::uint64_t permutations,
                                                 std::uint64_t seed,
                                                 TieMode tie_mode = TieMode::midrank);

}  // namespace parity
