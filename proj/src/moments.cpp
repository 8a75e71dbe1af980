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

#include "parity/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parity/error.hpp"

namespace parity {

double MomentSet::stddev() const { return std::sqrt(variance); }

MomentSet moment_set(std::span<const double> sample) {
    if (sample.empty()) throw DataError("moment_set: empty sample");
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!std::isfinite(sample[i])) {
            throw DataError("moment_set: non-finite value at index " + std::to_string(i));
        }
    }

    MomentSet m;
    m.sample_size = sample.size();
    const auto n = static_cast<long double>(sample.size());

    long double sum = 0.0L;
    for (double x : sample) sum += x;
    const long double mean = sum / n;
    m.mean = static_cast<double>(mean);

    // A constant sample has exactly zero spread; the two-pass sums could
    // otherwise leave rounding residue when the mean is not representable.
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    if (*lo == *hi) {
        m.mean = *lo;
        return m;
    }

    long double c2 = 0.0L, c3 = 0.0L, c4 = 0.0L;
    for (double x : sample) {
        const long double d = x - mean;
        const long double d2 = d * d;
        c2 += d2;
        c3 += d2 * d;
        c4 += d2 * d2;
    }
    const long double m2 = c2 / n;
    const long double m3 = c3 / n;
    const long double m4 = c4 / n;

    m.variance = static_cast<double>(m2);
    m.skewness = static_cast<double>(m3 / (m2 * std::sqrt(m2)));
    m.kurtosis = static_cast<double>(m4 / (m2 * m2) - 3.0L);
    return m;
}

}  // namespace parity
