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
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "parity/audit.hpp"

namespace parity {

enum class ReportFormat { json, markdown };

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept;

struct ReportDocument {
    ReportFormat format = ReportFormat::json;
    std::string content;
};

/// Keys in fixed order: config, groups, ad_test, verdict, posthoc, warnings.
/// Undefined statistics are null. Doubles serialize in shortest round-trip
/// form, so equal reports give byte-identical output.
nlohmann::ordered_json report_to_json(const AuditReport& report);

/// Markdown renders one table row per group pair with mean, standard
/// deviation, skewness and kurtosis of both groups; cells of significant
/// statistics are bold. Percentage metrics show mean and standard deviation
/// multiplied by 100 with a "%" suffix.
std::string render_markdown(const AuditReport& report, std::string_view title = {});

ReportDocument render_report(const AuditReport& report, ReportFormat format);

struct HistogramSeries {
    std::string label;
    std::size_t n = 0;
    std::size_t retained = 0;
    double excluded_fraction = 0.0;
    std::optional<double> excluded_mean;
    std::vector<std::size_t> counts;  // one per bin
    std::vector<double> ecdf;         // fraction of n at or below each upper edge
};

struct DistributionData {
    std::size_t bins = 0;
    std::optional<double> clip;
    std::vector<double> edges;  // bins + 1, shared by all groups
    std::vector<HistogramSeries> groups;

    /// '#'-prefixed per-group summary lines, then one table
    /// `[audit,]group,bin,lower,upper,count,fraction,ecdf`.
    std::string to_csv(std::string_view audit = {}, bool header = true) const;
};

/// Histogram and ECDF per group over shared bin edges. Values above `clip`
/// are excluded and summarized per group. Throws UsageError when bins < 2.
DistributionData export_distribution_data(const GroupedErrors& grouped, std::size_t bins,
                                          std::optional<double> clip = std::nullopt);

}  // namespace parity
