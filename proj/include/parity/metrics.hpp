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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace parity {

/// How a prediction/ground-truth pair is turned into an error value r.
enum class ErrorMetric {
    difference,            // yhat - y
    absolute_difference,   // |yhat - y|
    squared_signed,        // (yhat - y) * |yhat - y|
    squared,               // (yhat - y)^2
    percentage,            // (yhat - y) / y, stored as a ratio
    symmetric_percentage,  // 2 (yhat - y) / (yhat + y), 0/0 := 0
    identity,              // yhat; equal-outcome mode, truth ignored
};

/// CLI spelling: difference, absolute, squared-signed, squared, percentage,
/// symmetric-percentage, identity.
std::string_view metric_name(ErrorMetric metric) noexcept;
std::optional<ErrorMetric> parse_metric(std::string_view name) noexcept;

/// True for metrics whose values are ratios rendered as percentages.
constexpr bool is_percentage(ErrorMetric metric) noexcept {
    return metric == ErrorMetric::percentage || metric == ErrorMetric::symmetric_percentage;
}

struct ErrorVector {
    std::vector<double> values;
    ErrorMetric metric = ErrorMetric::difference;

    std::size_t size() const noexcept { return values.size(); }
};

/// Element-wise error computation. Throws DataError on length mismatch,
/// non-finite input, a zero truth under `percentage`, or a zero denominator
/// with nonzero numerator under `symmetric_percentage`. For `identity` the
/// truth vector may be empty.
ErrorVector compute_errors(std::span<const double> pred, std::span<const double> truth,
                           ErrorMetric metric);

}  // namespace parity
