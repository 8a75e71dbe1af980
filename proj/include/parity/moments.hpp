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

#include <cstddef>
#include <optional>
#include <span>

namespace parity {

/// First four moments of a sample, population (1/n) convention.
/// Skewness and excess kurtosis are empty exactly when the variance is zero.
struct MomentSet {
    std::size_t sample_size = 0;
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> skewness;
    std::optional<double> kurtosis;  // excess: normal == 0

    double stddev() const;
};

/// Throws DataError on an empty sample or non-finite values.
MomentSet moment_set(std::span<const double> sample);

}  // namespace parity
