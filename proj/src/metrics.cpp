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

#include "parity/metrics.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "parity/error.hpp"

namespace parity {
namespace {

constexpr std::array<std::pair<ErrorMetric, std::string_view>, 7> kNames{{
    {ErrorMetric::difference, "difference"},
    {ErrorMetric::absolute_difference, "absolute"},
    {ErrorMetric::squared_signed, "squared-signed"},
    {ErrorMetric::squared, "squared"},
    {ErrorMetric::percentage, "percentage"},
    {ErrorMetric::symmetric_percentage, "symmetric-percentage"},
    {ErrorMetric::identity, "identity"},
}};

void require_finite(std::span<const double> v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw DataError(std::string("non-finite ") + what + " value at row " +
                            std::to_string(i));
        }
    }
}

}  // namespace

std::string_view metric_name(ErrorMetric metric) noexcept {
    for (const auto& [m, name] : kNames) {
        if (m == metric) return name;
    }
    return "unknown";
}

std::optional<ErrorMetric> parse_metric(std::string_view name) noexcept {
    for (const auto& [m, n] : kNames) {
        if (n == name) return m;
    }
    return std::nullopt;
}

ErrorVector compute_errors(std::span<const double> pred, std::span<const double> truth,
                           ErrorMetric metric) {
    if (pred.empty()) throw DataError("compute_errors: empty prediction vector");
    const bool ignore_truth = metric == ErrorMetric::identity;
    if (!(ignore_truth && truth.empty()) && pred.size() != truth.size()) {
        throw DataError("compute_errors: prediction length " + std::to_string(pred.size()) +
                        " != truth length " + std::to_string(truth.size()));
    }
    require_finite(pred, "prediction");
    if (!ignore_truth) require_finite(truth, "truth");

    ErrorVector out;
    out.metric = metric;
    out.values.resize(pred.size());
    if (ignore_truth) {
        std::copy(pred.begin(), pred.end(), out.values.begin());
        return out;
    }

    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double diff = pred[i] - truth[i];
        double r = 0.0;
        switch (metric) {
        case ErrorMetric::difference: r = diff; break;
        case ErrorMetric::absolute_difference: r = std::abs(diff); break;
        case ErrorMetric::squared_signed: r = diff * std::abs(diff); break;
        case ErrorMetric::squared: r = diff * diff; break;
        case ErrorMetric::percentage:
            if (truth[i] == 0.0) {
                throw DataError("percentage error undefined: truth is zero at row " +
                                std::to_string(i));
            }
            r = diff / truth[i];
            break;
        case ErrorMetric::symmetric_percentage: {
            const double denom = pred[i] + truth[i];
            if (denom == 0.0) {
                if (diff != 0.0) {
                    throw DataError(
                        "symmetric percentage error undefined: prediction + truth is zero "
                        "with nonzero difference at row " + std::to_string(i));
                }
                r = 0.0;
            } else {
                r = 2.0 * diff / denom;
            }
            break;
        }
        case ErrorMetric::identity: r = pred[i]; break;
        }
        if (!std::isfinite(r)) {
            throw DataError("error value overflows at row " + std::to_string(i));
        }
        out.values[i] = r;
    }
    return out;
}

}  // namespace parity
