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

#include "parity/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "parity/error.hpp"
#include "parity/permtest_kernels.hpp"
#include "parity/rng.hpp"

namespace parity {

std::string_view correction_name(Correction c) noexcept {
    switch (c) {
    case Correction::none: return "none";
    case Correction::holm: return "holm";
    case Correction::bonferroni: return "bonferroni";
    }
    return "unknown";
}

std::optional<Correction> parse_correction(std::string_view name) noexcept {
    if (name == "none") return Correction::none;
    if (name == "holm") return Correction::holm;
    if (name == "bonferroni") return Correction::bonferroni;
    return std::nullopt;
}

std::string_view verdict_name(Verdict v) noexcept {
    return v == Verdict::fair ? "fair" : "unfair";
}

std::size_t GroupedErrors::total() const noexcept {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.values.size();
    return n;
}

std::vector<std::vector<double>> GroupedErrors::samples() const {
    std::vector<std::vector<double>> out;
    out.reserve(groups.size());
    for (const auto& g : groups) out.push_back(g.values);
    return out;
}

void validate(const AuditConfig& config) {
    if (!tabulated_alpha(config.alpha)) {
        throw UsageError("alpha " + std::to_string(config.alpha) +
                         " is not tabulated; use one of 0.25, 0.10, 0.05, 0.025, 0.01");
    }
    if (config.permutations < 1) throw UsageError("permutations must be >= 1");
    if (config.min_group_size < 1) throw UsageError("min_group_size must be >= 1");
}

GroupedErrors partition_errors(const ErrorVector& errors, std::span<const std::string> labels,
                               std::size_t min_group_size) {
    if (labels.size() != errors.size()) {
        throw DataError("partition: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(errors.size()) + " errors");
    }
    std::map<std::string, std::vector<double>> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(errors.values[i]);

    GroupedErrors out;
    out.metric = errors.metric;
    for (auto& [label, values] : by_label) {
        if (values.size() < min_group_size) {
            out.warnings.push_back("group '" + label + "' excluded: " +
                                   std::to_string(values.size()) + " observations < minimum " +
                                   std::to_string(min_group_size));
            continue;
        }
        out.groups.push_back({label, std::move(values)});
    }
    if (out.groups.empty()) throw DataError("partition: no group has enough observations");
    return out;
}

std::vector<std::string> intersect_labels(std::span<const std::vector<std::string>> columns) {
    if (columns.empty()) throw DataError("intersect_labels: no label columns");
    const std::size_t n = columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != n) throw DataError("intersect_labels: label columns differ in length");
    }
    std::vector<std::string> out(columns.front());
    for (std::size_t c = 1; c < columns.size(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i].append(kIntersectSeparator);
            out[i].append(columns[c][i]);
        }
    }
    return out;
}

std::uint64_t pair_seed(std::uint64_t master, std::span<const double> a,
                        std::span<const double> b) {
    return substream_seed(master, kernels::PooledSample(a, b).content_hash());
}

std::vector<std::optional<double>> adjust_pvalues(std::span<const std::optional<double>> p,
                                                  Correction correction) {
    std::vector<std::optional<double>> out(p.begin(), p.end());
    std::vector<std::size_t> defined;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i]) defined.push_back(i);
    }
    const auto m = static_cast<double>(defined.size());
    switch (correction) {
    case Correction::none: break;
    case Correction::bonferroni:
        for (std::size_t i : defined) out[i] = std::min(1.0, *p[i] * m);
        break;
    case Correction::holm: {
        std::stable_sort(defined.begin(), defined.end(),
                         [&](std::size_t x, std::size_t y) { return *p[x] < *p[y]; });
        double running = 0.0;
        for (std::size_t rank = 0; rank < defined.size(); ++rank) {
            const std::size_t i = defined[rank];
            running = std::max(running, std::min(1.0, (m - static_cast<double>(rank)) * *p[i]));
            out[i] = running;
        }
        break;
    }
    }
    return out;
}

AuditReport run_audit(const GroupedErrors& grouped, const AuditConfig& config) {
    validate(config);
    if (grouped.groups.size() < 2) {
        throw DataError("audit needs at least 2 groups, got " +
                        std::to_string(grouped.groups.size()));
    }

    AuditReport report;
    report.config = config;
    report.config.metric = grouped.metric;
    report.warnings = grouped.warnings;

    for (const auto& g : grouped.groups) {
        GroupSummary s;
        s.label = g.label;
        s.size = g.values.size();
        s.moments = moment_set(g.values);
        std::vector<double> abs_err(g.values.size());
        std::transform(g.values.begin(), g.values.end(), abs_err.begin(),
                       [](double v) { return std::abs(v); });
        const MomentSet am = moment_set(abs_err);
        s.mean_abs_error = am.mean;
        s.abs_error_sd = am.stddev();
        report.groups.push_back(std::move(s));
    }

    const auto samples = grouped.samples();
    try {
        report.ad = ad_test(samples, config.alpha, config.tie_mode);
    } catch (const DataError& e) {
        throw DataError(std::string("omnibus test: ") + e.what());
    }

    if (!report.ad.reject) {
        report.verdict = Verdict::fair;
        return report;
    }
    report.verdict = Verdict::unfair;

    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            PosthocPair pair;
            pair.test = permutation_test(samples[i], samples[j], config.permutations,
                                         pair_seed(config.seed, samples[i], samples[j]));
            pair.test.group_a = grouped.groups[i].label;
            pair.test.group_b = grouped.groups[j].label;
            report.posthoc.push_back(std::move(pair));
        }
    }

    std::vector<std::optional<double>> family;
    for (const auto& pair : report.posthoc) {
        family.insert(family.end(), pair.test.p_values.begin(), pair.test.p_values.end());
    }
    const auto adjusted = adjust_pvalues(family, config.correction);
    for (std::size_t k = 0; k < report.posthoc.size(); ++k) {
        auto& pair = report.posthoc[k];
        for (std::size_t s = 0; s < 4; ++s) {
            pair.adjusted[s] = adjusted[4 * k + s];
            pair.significant[s] = pair.adjusted[s] && *pair.adjusted[s] <= config.alpha;
        }
    }
    return report;
}

AuditReport run_audit(const ErrorVector& errors, std::span<const std::string> labels,
                      const AuditConfig& config) {
    validate(config);
    return run_audit(partition_errors(errors, labels, config.min_group_size), config);
}

AuditReport run_audit(std::span<const double> pred, std::span<const double> truth,
                      std::span<const std::string> labels, const AuditConfig& config) {
    validate(config);
    return run_audit(compute_errors(pred, truth, config.metric), labels, config);
}

}  // namespace parity
