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

// parity-audit: error-parity fairness audits from the command line.
//
//   parity-audit audit    --input data.csv --pred-col m --truth-col y --group-col g --output r.json
//   parity-audit simulate --family normal --shift 0.5 --n 200 --trials 500 ...
//   parity-audit exact    --input small.csv --pred-col m --truth-col y --group-col g ...
//
// Exit codes: 0 success, 1 unfair verdict with --fail-on-unfair,
// 2 usage/configuration error, 3 data error.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parity/audit.hpp"
#include "parity/calibrate.hpp"
#include "parity/error.hpp"
#include "parity/ingest.hpp"
#include "parity/parallel.hpp"
#include "parity/report.hpp"

namespace {

using nlohmann::ordered_json;
using namespace parity;

constexpr int kExitOk = 0;
constexpr int kExitUnfair = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::string shortest(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Options shared by `audit` and `exact`.
struct DataOptions {
    std::string input;
    std::vector<std::string> pred_cols;
    std::string truth_col;
    std::vector<std::string> group_cols;
    std::vector<std::string> thresholds;
    bool intersect = false;
    std::string metric = "percentage";
    std::optional<double> min_truth;
    char delimiter = ',';
    std::size_t min_group_size = 10;
};

struct AuditOptions {
    DataOptions data;
    double alpha = 0.01;
    std::uint64_t permutations = 100'000;
    std::uint64_t seed = 42;
    std::string correction = "none";
    std::string tie_mode = "midrank";
    std::string format = "json";
    std::string plot_data;
    std::optional<double> clip;
    std::size_t bins = 50;
    bool fail_on_unfair = false;
    std::string output;
};

struct ExactOptions {
    DataOptions data;
    std::uint64_t max_assignments = kDefaultMaxAssignments;
    std::string output;
};

struct SimulateOptions {
    std::string family = "normal";
    double shift = 0.0;
    std::size_t n = 100;
    std::size_t groups = 2;
    double scale = 1.0;
    std::optional<double> shape;
    std::size_t trials = 1000;
    double alpha = 0.05;
    std::uint64_t permutations = 1000;
    std::uint64_t seed = 42;
    std::string tie_mode = "midrank";
    std::string output;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
    cmd->add_option("--input", o.input, "CSV file with a header row")->required();
    cmd->add_option("--pred-col", o.pred_cols, "Prediction column; repeat for several models")
        ->required();
    cmd->add_option("--truth-col", o.truth_col, "Ground-truth column")->required();
    cmd->add_option("--group-col", o.group_cols, "Sensitive-group label column; repeatable");
    cmd->add_option("--label-threshold", o.thresholds,
                    "Derive labels from a numeric column: <col>:<t>:<above>:<at-or-below>");
    cmd->add_flag("--intersect", o.intersect, "Also audit the intersection of all label columns");
    cmd->add_option("--metric", o.metric,
                    "difference|absolute|squared-signed|squared|percentage|"
                    "symmetric-percentage|identity")
        ->capture_default_str();
    cmd->add_option("--min-truth", o.min_truth, "Drop rows whose truth is below this value");
    cmd->add_option("--delimiter", o.delimiter, "Field delimiter")->capture_default_str();
}

struct LabelSet {
    std::string name;
    std::vector<std::string> labels;
};

struct PreparedData {
    Dataset dataset;
    std::size_t loaded_rows = 0;
    std::vector<LabelSet> label_sets;
    ErrorMetric metric = ErrorMetric::percentage;
    std::vector<std::string> warnings;
};

PreparedData prepare_data(const DataOptions& o) {
    PreparedData p;
    const auto metric = parse_metric(o.metric);
    if (!metric) throw UsageError("unknown metric '" + o.metric + "'");
    p.metric = *metric;

    std::vector<LabelThreshold> thresholds;
    for (const auto& t : o.thresholds) thresholds.push_back(parse_label_threshold(t));
    if (o.group_cols.empty() && thresholds.empty()) {
        throw UsageError("give at least one --group-col or --label-threshold");
    }

    Schema schema;
    schema.pred_columns = o.pred_cols;
    schema.truth_column = o.truth_col;
    schema.label_columns = o.group_cols;
    schema.delimiter = o.delimiter;
    for (const auto& t : thresholds) schema.label_source_columns.push_back(t.column);

    p.dataset = load_csv(o.input, schema);
    p.loaded_rows = p.dataset.rows;
    if (o.min_truth) {
        p.dataset = filter_min_truth(p.dataset, *o.min_truth);
        if (p.dataset.removed_rows > 0) {
            p.warnings.push_back("removed " + std::to_string(p.dataset.removed_rows) +
                                 " rows with truth below " + shortest(*o.min_truth));
        }
    }

    for (const auto& g : o.group_cols) {
        const auto text = p.dataset.text(g);
        p.label_sets.push_back({g, {text.begin(), text.end()}});
    }
    for (const auto& t : thresholds) {
        p.label_sets.push_back({t.column, derive_binary_labels(p.dataset.numeric(t.column),
                                                               t.threshold, t.above,
                                                               t.at_or_below)});
    }
    if (o.intersect && p.label_sets.size() >= 2) {
        std::vector<std::vector<std::string>> cols;
        std::string name;
        for (const auto& s : p.label_sets) {
            cols.push_back(s.labels);
            name += (name.empty() ? "" : std::string(kIntersectSeparator)) + s.name;
        }
        p.label_sets.push_back({name, intersect_labels(cols)});
    }
    return p;
}

void write_file(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << content;
}

int run_audit_command(const AuditOptions& o) {
    AuditConfig cfg;
    cfg.alpha = o.alpha;
    cfg.permutations = o.permutations;
    cfg.seed = o.seed;
    cfg.min_group_size = o.data.min_group_size;
    const auto corr = parse_correction(o.correction);
    if (!corr) throw UsageError("unknown correction '" + o.correction + "'");
    cfg.correction = *corr;
    const auto tie = parse_tie_mode(o.tie_mode);
    if (!tie) throw UsageError("unknown tie mode '" + o.tie_mode + "'");
    cfg.tie_mode = *tie;
    const auto format = parse_report_format(o.format);
    if (!format) throw UsageError("unknown format '" + o.format + "'");

    PreparedData data = prepare_data(o.data);
    cfg.metric = data.metric;
    validate(cfg);

    ordered_json doc;
    doc["rows_loaded"] = data.loaded_rows;
    doc["rows_filtered"] = data.dataset.removed_rows;
    doc["rows_audited"] = data.dataset.rows;
    doc["audits"] = ordered_json::array();
    std::string markdown = "# Error parity audit\n\n";
    markdown += "Rows loaded: " + std::to_string(data.loaded_rows) +
                ", removed by filtering: " + std::to_string(data.dataset.removed_rows) +
                ", audited: " + std::to_string(data.dataset.rows) + "\n\n";
    std::string plot;
    bool any_unfair = false;

    const auto truth = data.dataset.truth();
    for (const auto& model : o.data.pred_cols) {
        const ErrorVector errors = compute_errors(data.dataset.numeric(model), truth, cfg.metric);
        for (const auto& set : data.label_sets) {
            GroupedErrors grouped = partition_errors(errors, set.labels, cfg.min_group_size);
            grouped.warnings.insert(grouped.warnings.begin(), data.warnings.begin(),
                                    data.warnings.end());
            AuditReport report = run_audit(grouped, cfg);
            any_unfair = any_unfair || report.verdict == Verdict::unfair;

            ordered_json entry;
            entry["model"] = model;
            entry["group_column"] = set.name;
            const ordered_json body = report_to_json(report);
            for (const auto& [key, value] : body.items()) entry[key] = value;
            doc["audits"].push_back(std::move(entry));
            markdown += render_markdown(report, "Model `" + model + "` by `" + set.name + "`");
            markdown += "\n";

            if (!o.plot_data.empty()) {
                plot += export_distribution_data(grouped, o.bins, o.clip)
                            .to_csv(model + "/" + set.name, plot.empty());
            }
        }
    }

    write_file(o.output, *format == ReportFormat::json ? doc.dump(2) + "\n" : markdown);
    if (!o.plot_data.empty()) write_file(o.plot_data, plot);
    return (o.fail_on_unfair && any_unfair) ? kExitUnfair : kExitOk;
}

int run_exact_command(const ExactOptions& o) {
    PreparedData data = prepare_data(o.data);
    const auto truth = data.dataset.truth();
    ordered_json doc;
    doc["rows_loaded"] = data.loaded_rows;
    doc["rows_filtered"] = data.dataset.removed_rows;
    doc["max_assignments"] = o.max_assignments;
    doc["tests"] = ordered_json::array();
    for (const auto& model : o.data.pred_cols) {
        const ErrorVector errors = compute_errors(data.dataset.numeric(model), truth, data.metric);
        for (const auto& set : data.label_sets) {
            const GroupedErrors grouped =
                partition_errors(errors, set.labels, o.data.min_group_size);
            for (std::size_t i = 0; i < grouped.groups.size(); ++i) {
                for (std::size_t j = i + 1; j < grouped.groups.size(); ++j) {
                    const auto& a = grouped.groups[i];
                    const auto& b = grouped.groups[j];
                    const PermutationResult r =
                        exact_permutation_test(a.values, b.values, o.max_assignments);
                    ordered_json t;
                    t["model"] = model;
                    t["group_column"] = set.name;
                    t["group_a"] = a.label;
                    t["group_b"] = b.label;
                    t["n_a"] = r.n_a;
                    t["n_b"] = r.n_b;
                    t["assignments"] = r.permutations;
                    ordered_json stats;
                    for (Statistic s : kStatistics) {
                        ordered_json sj;
                        const auto& d = at(r.observed_diff, s);
                        const auto& p = at(r.p_values, s);
                        sj["observed_diff"] = d ? ordered_json(*d) : ordered_json(nullptr);
                        sj["p_value"] = p ? ordered_json(*p) : ordered_json(nullptr);
                        sj["skipped"] = r.skipped(s);
                        stats[std::string(statistic_name(s))] = std::move(sj);
                    }
                    t["statistics"] = std::move(stats);
                    doc["tests"].push_back(std::move(t));
                }
            }
        }
    }
    write_file(o.output, doc.dump(2) + "\n");
    return kExitOk;
}

int run_simulate_command(const SimulateOptions& o) {
    const auto family = parse_family(o.family);
    if (!family) throw UsageError("unknown family '" + o.family + "'");
    const auto tie = parse_tie_mode(o.tie_mode);
    if (!tie) throw UsageError("unknown tie mode '" + o.tie_mode + "'");
    const GeneratorSpec spec =
        GeneratorSpec::shifted(*family, o.groups, o.n, o.shift, o.scale, o.shape);
    const CalibrationResult r =
        simulate_rejection_rate(spec, o.trials, o.alpha, o.permutations, o.seed, *tie);

    ordered_json doc;
    ordered_json cfg;
    cfg["family"] = family_name(*family);
    cfg["shift"] = o.shift;
    cfg["scale"] = o.scale;
    cfg["shape"] = o.shape ? ordered_json(*o.shape) : ordered_json(nullptr);
    cfg["groups"] = o.groups;
    cfg["n"] = o.n;
    cfg["trials"] = o.trials;
    cfg["alpha"] = o.alpha;
    cfg["permutations"] = o.permutations;
    cfg["seed"] = o.seed;
    cfg["tie_mode"] = tie_mode_name(*tie);
    doc["config"] = std::move(cfg);
    doc["rejections"] = r.rejections;
    doc["rate"] = r.rate;
    ordered_json log = ordered_json::array();
    for (const auto& t : r.log) {
        ordered_json tj;
        tj["trial"] = t.trial;
        tj["seed"] = t.seed;
        tj["reject"] = t.reject;
        tj["a2"] = t.a2;
        tj["t"] = t.t;
        tj["p_value"] = t.p_value;
        ordered_json pairs = ordered_json::array();
        for (const auto& ps : t.posthoc) {
            ordered_json pj;
            for (Statistic s : kStatistics) {
                const auto& p = at(ps, s);
                pj[std::string(statistic_name(s))] = p ? ordered_json(*p) : ordered_json(nullptr);
            }
            pairs.push_back(std::move(pj));
        }
        tj["posthoc"] = std::move(pairs);
        log.push_back(std::move(tj));
    }
    doc["log"] = std::move(log);
    write_file(o.output, doc.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Error-parity fairness auditing for regression models"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Upper bound on worker threads (0 = runtime default)");

    AuditOptions audit;
    CLI::App* audit_cmd = app.add_subcommand("audit", "Run the two-stage audit on a CSV file");
    add_data_options(audit_cmd, audit.data);
    audit_cmd->add_option("--alpha", audit.alpha, "0.25|0.10|0.05|0.025|0.01")->capture_default_str();
    audit_cmd->add_option("--permutations", audit.permutations)->capture_default_str();
    audit_cmd->add_option("--seed", audit.seed)->capture_default_str();
    audit_cmd->add_option("--correction", audit.correction, "none|holm|bonferroni")
        ->capture_default_str();
    audit_cmd->add_option("--tie-mode", audit.tie_mode, "midrank|continuous")->capture_default_str();
    audit_cmd->add_option("--min-group-size", audit.data.min_group_size)->capture_default_str();
    audit_cmd->add_option("--format", audit.format, "json|markdown")->capture_default_str();
    audit_cmd->add_option("--plot-data", audit.plot_data, "Write histogram/ECDF CSV here");
    audit_cmd->add_option("--clip", audit.clip, "Exclude errors above this value from plot data");
    audit_cmd->add_option("--bins", audit.bins, "Histogram bins for plot data")->capture_default_str();
    audit_cmd->add_flag("--fail-on-unfair", audit.fail_on_unfair, "Exit with 1 on an unfair verdict");
    audit_cmd->add_option("--output", audit.output, "Report path ('-' for stdout)")->required();
    audit_cmd->add_option("--threads", threads, "Upper bound on worker threads");

    SimulateOptions sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo type-I error / power");
    sim_cmd->add_option("--family", sim.family, "normal|lognormal|uniform|student_t")
        ->capture_default_str();
    sim_cmd->add_option("--shift", sim.shift, "Location shift of the last group")->capture_default_str();
    sim_cmd->add_option("--n", sim.n, "Observations per group")->capture_default_str();
    sim_cmd->add_option("--groups", sim.groups, "Number of groups")->capture_default_str();
    sim_cmd->add_option("--scale", sim.scale)->capture_default_str();
    sim_cmd->add_option("--shape", sim.shape, "lognormal sigma or student_t degrees of freedom");
    sim_cmd->add_option("--trials", sim.trials)->capture_default_str();
    sim_cmd->add_option("--alpha", sim.alpha)->capture_default_str();
    sim_cmd->add_option("--permutations", sim.permutations)->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
    sim_cmd->add_option("--tie-mode", sim.tie_mode)->capture_default_str();
    sim_cmd->add_option("--output", sim.output, "Result path (default stdout)");
    sim_cmd->add_option("--threads", threads, "Upper bound on worker threads");

    ExactOptions exact;
    exact.data.min_group_size = 1;
    CLI::App* exact_cmd = app.add_subcommand("exact", "Exact permutation tests for small groups");
    add_data_options(exact_cmd, exact.data);
    exact_cmd->add_option("--max-assignments", exact.max_assignments)->capture_default_str();
    exact_cmd->add_option("--min-group-size", exact.data.min_group_size)->capture_default_str();
    exact_cmd->add_option("--output", exact.output, "Result path (default stdout)");
    exact_cmd->add_option("--threads", threads, "Upper bound on worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        set_thread_count(threads);
        if (audit_cmd->parsed()) return run_audit_command(audit);
        if (sim_cmd->parsed()) return run_simulate_command(sim);
        if (exact_cmd->parsed()) return run_exact_command(exact);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
