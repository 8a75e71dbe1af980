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

#include "parity/calibrate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "parity/audit.hpp"
#include "parity/error.hpp"
#include "parity/rng.hpp"

namespace parity {
namespace {

double variate(const GroupGenerator& g, std::mt19937_64& eng) {
    switch (g.family) {
    case Family::normal: return std::normal_distribution<double>(0.0, 1.0)(eng);
    case Family::lognormal:
        return std::exp(g.shape.value_or(0.5) * std::normal_distribution<double>(0.0, 1.0)(eng));
    case Family::uniform: {
        const double h = std::sqrt(3.0);
        return std::uniform_real_distribution<double>(-h, h)(eng);
    }
    case Family::student_t: return std::student_t_distribution<double>(g.shape.value_or(5.0))(eng);
    }
    return 0.0;
}

void check_settings(std::size_t trials, double alpha) {
    if (trials < 1) throw UsageError("simulation needs at least 1 trial");
    if (!tabulated_alpha(alpha)) {
        throw UsageError("alpha " + std::to_string(alpha) + " is not tabulated");
    }
}

TrialRecord run_trial(const GeneratorSpec& spec, std::size_t trial, const AuditConfig& base,
                      std::uint64_t seed) {
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = substream_seed(seed, trial);

    GroupedErrors grouped;
    auto samples = draw_groups(spec, rec.seed);
    for (std::size_t g = 0; g < samples.size(); ++g) {
        grouped.groups.push_back({"g" + std::to_string(g), std::move(samples[g])});
    }
    AuditConfig cfg = base;
    cfg.seed = rec.seed;
    const AuditReport report = run_audit(grouped, cfg);

    rec.reject = report.ad.reject;
    rec.a2 = report.ad.a2;
    rec.t = report.ad.t;
    rec.p_value = report.ad.p_value;
    for (const auto& pair : report.posthoc) rec.posthoc.push_back(pair.test.p_values);
    return rec;
}

AuditConfig base_config(double alpha, std::uint64_t permutations, TieMode tie_mode) {
    AuditConfig cfg;
    cfg.metric = ErrorMetric::identity;
    cfg.alpha = alpha;
    cfg.permutations = permutations;
    cfg.tie_mode = tie_mode;
    cfg.min_group_size = 1;
    validate(cfg);
    return cfg;
}

CalibrationResult summarize(std::vector<TrialRecord> log) {
    CalibrationResult r;
    for (const auto& t : log) r.rejections += t.reject ? 1 : 0;
    r.rate = static_cast<double>(r.rejections) / static_cast<double>(log.size());
    r.log = std::move(log);
    return r;
}

}  // namespace

std::string_view family_name(Family f) noexcept {
    switch (f) {
    case Family::normal: return "normal";
    case Family::lognormal: return "lognormal";
    case Family::uniform: return "uniform";
    case Family::student_t: return "student_t";
    }
    return "unknown";
}

std::optional<Family> parse_family(std::string_view name) noexcept {
    for (Family f : {Family::normal, Family::lognormal, Family::uniform, Family::student_t}) {
        if (family_name(f) == name) return f;
    }
    return std::nullopt;
}

GeneratorSpec GeneratorSpec::shifted(Family family, std::size_t k, std::size_t n, double shift,
                                     double scale, std::optional<double> shape) {
    GeneratorSpec spec;
    for (std::size_t g = 0; g < k; ++g) {
        spec.groups.push_back({family, g + 1 == k ? shift : 0.0, scale, shape, n});
    }
    return spec;
}

void validate(const GeneratorSpec& spec) {
    if (spec.groups.size() < 2) throw UsageError("generator spec needs at least 2 groups");
    for (const auto& g : spec.groups) {
        if (!(g.scale > 0.0) || !std::isfinite(g.scale)) {
            throw UsageError("generator scale must be positive and finite");
        }
        if (g.shape && !(*g.shape > 0.0)) throw UsageError("generator shape must be positive");
        if (g.size < 1) throw UsageError("generator group size must be >= 1");
        if (!std::isfinite(g.location)) throw UsageError("generator location must be finite");
    }
}

std::vector<std::vector<double>> draw_groups(const GeneratorSpec& spec, std::uint64_t seed) {
    std::vector<std::vector<double>> out;
    out.reserve(spec.groups.size());
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const GroupGenerator& gen = spec.groups[g];
        std::mt19937_64 eng(substream_seed(seed, g));
        std::vector<double> values(gen.size);
        for (double& v : values) v = gen.location + gen.scale * variate(gen, eng);
        out.push_back(std::move(values));
    }
    return out;
}

CalibrationResult simulate_rejection_rate(const GeneratorSpec& spec, std::size_t trials,
                                          double alpha, std::uint64_t permutations,
                                          std::uint64_t seed, TieMode tie_mode) {
    check_settings(trials, alpha);
    validate(spec);
    const AuditConfig cfg = base_config(alpha, permutations, tie_mode);

    std::vector<TrialRecord> log(trials);
    const auto n = static_cast<std::int64_t>(trials);
    bool failed = false;
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            log[static_cast<std::size_t>(i)] =
                run_trial(spec, static_cast<std::size_t>(i), cfg, seed);
        } catch (const std::exception& e) {
#pragma omp critical(parity_calibrate_error)
            {
                failed = true;
                failure = e.what();
            }
        }
    }
    if (failed) throw DataError("simulation trial failed: " + failure);
    return summarize(std::move(log));
}

CalibrationResult simulate_rejection_rate_serial(const GeneratorSpec& spec, std::size_t trials,
                                                 double alpha, std::uint64_t permutations,
                                                 std::uint64_t seed, TieMode tie_mode) {
    check_settings(trials, alpha);
    validate(spec);
    const AuditConfig cfg = base_config(alpha, permutations, tie_mode);
    std::vector<TrialRecord> log;
    log.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) log.push_back(run_trial(spec, i, cfg, seed));
    return summarize(std::move(log));
}

}  // namespace parity
