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

#include "parity/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "parity/error.hpp"

namespace parity {
namespace {

using nlohmann::ordered_json;

ordered_json opt(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

double stat_value(const MomentSet& m, Statistic s) {
    switch (s) {
    case Statistic::mean: return m.mean;
    case Statistic::variance: return m.variance;
    case Statistic::skewness: return m.skewness.value_or(NAN);
    case Statistic::kurtosis: return m.kurtosis.value_or(NAN);
    }
    return NAN;
}

ordered_json stat_json(const MomentSet& m, Statistic s) {
    const double v = stat_value(m, s);
    return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v);
}

ordered_json moments_json(const MomentSet& m) {
    ordered_json j;
    j["n"] = m.sample_size;
    j["mean"] = m.mean;
    j["variance"] = m.variance;
    j["std"] = m.stddev();
    j["skewness"] = opt(m.skewness);
    j["kurtosis"] = opt(m.kurtosis);
    return j;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// Mean and standard deviation carry the metric's unit; percentage metrics
// are stored as ratios and shown x100.
std::string unit_cell(double v, bool percent) {
    return percent ? fmt("%.2f%%", 100.0 * v) : fmt("%.4g", v);
}

std::string shape_cell(const std::optional<double>& v) {
    return v ? fmt("%.2f", *v) : std::string("n/a");
}

std::string p_cell(const std::optional<double>& p) { return p ? fmt("%.4g", *p) : "skipped"; }

std::string bold_if(std::string cell, bool bold) {
    return bold ? "**" + cell + "**" : cell;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept {
    if (name == "json") return ReportFormat::json;
    if (name == "markdown") return ReportFormat::markdown;
    return std::nullopt;
}

nlohmann::ordered_json report_to_json(const AuditReport& report) {
    ordered_json j;

    ordered_json cfg;
    cfg["metric"] = metric_name(report.config.metric);
    cfg["alpha"] = report.config.alpha;
    cfg["permutations"] = report.config.permutations;
    cfg["seed"] = report.config.seed;
    cfg["tie_mode"] = tie_mode_name(report.config.tie_mode);
    cfg["min_group_size"] = report.config.min_group_size;
    cfg["correction"] = correction_name(report.config.correction);
    j["config"] = std::move(cfg);

    ordered_json groups = ordered_json::array();
    for (const auto& g : report.groups) {
        ordered_json gj;
        gj["label"] = g.label;
        gj["moments"] = moments_json(g.moments);
        gj["mean_abs_error"] = g.mean_abs_error;
        gj["abs_error_sd"] = g.abs_error_sd;
        groups.push_back(std::move(gj));
    }
    j["groups"] = std::move(groups);

    const AdTestResult& ad = report.ad;
    ordered_json adj;
    adj["a2"] = ad.a2;
    adj["sigma_n"] = ad.sigma_n;
    adj["t"] = ad.t;
    adj["k"] = ad.k;
    adj["n_total"] = ad.n_total;
    adj["group_sizes"] = ad.group_sizes;
    adj["p_value"] = ad.p_value;
    adj["p_floored"] = ad.floored;
    adj["p_capped"] = ad.capped;
    adj["alpha"] = ad.alpha;
    adj["critical_value"] = ad.critical_value;
    adj["reject"] = ad.reject;
    adj["tie_mode"] = tie_mode_name(ad.tie_mode);
    j["ad_test"] = std::move(adj);

    j["verdict"] = verdict_name(report.verdict);

    ordered_json posthoc = ordered_json::array();
    for (const auto& pair : report.posthoc) {
        const PermutationResult& t = pair.test;
        ordered_json pj;
        pj["group_a"] = t.group_a;
        pj["group_b"] = t.group_b;
        pj["n_a"] = t.n_a;
        pj["n_b"] = t.n_b;
        pj["permutations"] = t.permutations;
        pj["seed"] = t.seed;
        pj["exact"] = t.exact;
        ordered_json stats;
        for (Statistic s : kStatistics) {
            ordered_json sj;
            sj["value_a"] = stat_json(t.moments_a, s);
            sj["value_b"] = stat_json(t.moments_b, s);
            sj["observed_diff"] = opt(at(t.observed_diff, s));
            sj["p_value"] = opt(at(t.p_values, s));
            sj["adjusted_p_value"] = opt(at(pair.adjusted, s));
            sj["significant"] = at(pair.significant, s);
            sj["skipped"] = t.skipped(s);
            stats[std::string(statistic_name(s))] = std::move(sj);
        }
        pj["statistics"] = std::move(stats);
        posthoc.push_back(std::move(pj));
    }
    j["posthoc"] = std::move(posthoc);
    j["warnings"] = report.warnings;
    return j;
}

std::string render_markdown(const AuditReport& report, std::string_view title) {
    const bool pct = is_percentage(report.config.metric);
    const AdTestResult& ad = report.ad;
    std::string md;
    if (!title.empty()) md += "## " + std::string(title) + "\n\n";

    md += "**Verdict: " + std::string(verdict_name(report.verdict)) + "** (metric " +
          std::string(metric_name(report.config.metric)) + ", alpha " + fmt("%g", ad.alpha) +
          ")\n\n";
    md += "| A² | σ_N | T | critical T | p | k | N |\n";
    md += "|---:|---:|---:|---:|---:|---:|---:|\n";
    std::string p = fmt("%.4g", ad.p_value);
    if (ad.floored) p = "< " + p;
    if (ad.capped) p = "> " + p;
    md += "| " + fmt("%.4f", ad.a2) + " | " + fmt("%.4f", ad.sigma_n) + " | " +
          fmt("%.4f", ad.t) + " | " + fmt("%.4f", ad.critical_value) + " | " + p + " | " +
          std::to_string(ad.k) + " | " + std::to_string(ad.n_total) + " |\n\n";

    md += "| group | n | mean abs. error | μ | σ | ψ | κ |\n";
    md += "|---|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& g : report.groups) {
        md += "| " + g.label + " | " + std::to_string(g.size) + " | " +
              unit_cell(g.mean_abs_error, pct) + " | " + unit_cell(g.moments.mean, pct) + " | " +
              unit_cell(g.moments.stddev(), pct) + " | " + shape_cell(g.moments.skewness) +
              " | " + shape_cell(g.moments.kurtosis) + " |\n";
    }
    md += "\n";

    if (report.posthoc.empty()) {
        md += "No post hoc comparisons: the omnibus test did not reject.\n";
    } else {
        md += "Post hoc permutation tests (" + std::to_string(report.config.permutations) +
              " permutations, correction " + std::string(correction_name(report.config.correction)) +
              "). Bold values differ significantly between the two groups at alpha " +
              fmt("%g", ad.alpha) + ".\n\n";
        const std::string u = pct ? " (%)" : "";
        md += "| pair (A vs B) | μ" + u + " A | μ" + u + " B | σ" + u + " A | σ" + u +
              " B | ψ A | ψ B | κ A | κ B |\n";
        md += "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
        for (const auto& pair : report.posthoc) {
            const auto& t = pair.test;
            const auto sig = [&](Statistic s) { return at(pair.significant, s); };
            md += "| " + t.group_a + " vs " + t.group_b + " | " +
                  bold_if(unit_cell(t.moments_a.mean, pct), sig(Statistic::mean)) + " | " +
                  bold_if(unit_cell(t.moments_b.mean, pct), sig(Statistic::mean)) + " | " +
                  bold_if(unit_cell(t.moments_a.stddev(), pct), sig(Statistic::variance)) + " | " +
                  bold_if(unit_cell(t.moments_b.stddev(), pct), sig(Statistic::variance)) + " | " +
                  bold_if(shape_cell(t.moments_a.skewness), sig(Statistic::skewness)) + " | " +
                  bold_if(shape_cell(t.moments_b.skewness), sig(Statistic::skewness)) + " | " +
                  bold_if(shape_cell(t.moments_a.kurtosis), sig(Statistic::kurtosis)) + " | " +
                  bold_if(shape_cell(t.moments_b.kurtosis), sig(Statistic::kurtosis)) + " |\n";
        }
        md += "\n| pair | p(μ) | p(σ²) | p(ψ) | p(κ) |\n";
        md += "|---|---:|---:|---:|---:|\n";
        for (const auto& pair : report.posthoc) {
            md += "| " + pair.test.group_a + " vs " + pair.test.group_b;
            for (Statistic s : kStatistics) md += " | " + p_cell(at(pair.adjusted, s));
            md += " |\n";
        }
    }

    if (!report.warnings.empty()) {
        md += "\nWarnings:\n\n";
        for (const auto& w : report.warnings) md += "- " + w + "\n";
    }
    return md;
}

ReportDocument render_report(const AuditReport& report, ReportFormat format) {
    if (format == ReportFormat::json) return {format, report_to_json(report).dump(2) + "\n"};
    return {format, render_markdown(report)};
}

DistributionData export_distribution_data(const GroupedErrors& grouped, std::size_t bins,
                                          std::optional<double> clip) {
    if (bins < 2) throw UsageError("distribution export needs at least 2 bins");
    const auto kept = [&](double v) { return !clip || v <= *clip; };

    double lo = INFINITY, hi = -INFINITY;
    for (const auto& g : grouped.groups) {
        for (double v : g.values) {
            if (!kept(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (lo > hi) lo = hi = clip.value_or(0.0);
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
        if (clip && hi > *clip) {
            hi = *clip;
            lo = hi - 1.0;
        }
    }

    DistributionData out;
    out.bins = bins;
    out.clip = clip;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < bins; ++i) out.edges.push_back(lo + width * static_cast<double>(i));
    out.edges.push_back(hi);

    for (const auto& g : grouped.groups) {
        HistogramSeries s;
        s.label = g.label;
        s.n = g.values.size();
        s.counts.assign(bins, 0);
        double excluded_sum = 0.0;
        for (double v : g.values) {
            if (!kept(v)) {
                excluded_sum += v;
                continue;
            }
            ++s.retained;
            auto bin = static_cast<std::size_t>(std::max(0.0, std::floor((v - lo) / width)));
            s.counts[std::min(bin, bins - 1)] += 1;
        }
        const std::size_t excluded = s.n - s.retained;
        s.excluded_fraction = static_cast<double>(excluded) / static_cast<double>(s.n);
        if (excluded > 0) s.excluded_mean = excluded_sum / static_cast<double>(excluded);
        std::size_t running = 0;
        for (std::size_t c : s.counts) {
            running += c;
            s.ecdf.push_back(static_cast<double>(running) / static_cast<double>(s.n));
        }
        out.groups.push_back(std::move(s));
    }
    return out;
}

std::string DistributionData::to_csv(std::string_view audit, bool header) const {
    const auto num = [](double v) {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, ptr);
    };
    const std::string prefix = audit.empty() ? "" : std::string(audit) + ",";
    std::string out;
    for (const auto& g : groups) {
        out += "# " + prefix + "group=" + g.label + " n=" + std::to_string(g.n) +
               " retained=" + std::to_string(g.retained) +
               " excluded_fraction=" + num(g.excluded_fraction) +
               " excluded_mean=" + (g.excluded_mean ? num(*g.excluded_mean) : "none") +
               " clip=" + (clip ? num(*clip) : "none") + "\n";
    }
    if (header) out += (audit.empty() ? "" : "audit,") + std::string("group,bin,lower,upper,count,fraction,ecdf\n");
    for (const auto& g : groups) {
        for (std::size_t b = 0; b < bins; ++b) {
            out += prefix + g.label + "," + std::to_string(b) + "," + num(edges[b]) + "," +
                   num(edges[b + 1]) + "," + std::to_string(g.counts[b]) + "," +
                   num(static_cast<double>(g.counts[b]) / static_cast<double>(g.n)) + "," +
                   num(g.ecdf[b]) + "\n";
        }
    }
    return out;
}

}  // namespace parity
