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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "parity/audit.hpp"
#include "parity/error.hpp"
#include "parity/rng.hpp"

using namespace parity;
using Vec = std::vector<double>;
using Labels = std::vector<std::string>;

namespace {

struct Data {
    Vec errors;
    Labels labels;
};

Data normal_groups(std::uint64_t seed, std::size_t n, std::vector<double> shifts,
                   std::vector<std::string> names) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> z;
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t g = 0; g < shifts.size(); ++g) {
            d.errors.push_back(z(eng) + shifts[g]);
            d.labels.push_back(names[g]);
        }
    }
    return d;
}

AuditConfig quick(double alpha, std::uint64_t permutations = 2000) {
    AuditConfig c;
    c.metric = ErrorMetric::identity;
    c.alpha = alpha;
    c.permutations = permutations;
    c.min_group_size = 1;
    return c;
}

AuditReport audit(const Data& d, const AuditConfig& c) {
    return run_audit(ErrorVector{d.errors, ErrorMetric::identity}, d.labels, c);
}

}  // namespace

TEST_CASE("partition examples") {
    const ErrorVector e{{1, 2, 3, 4}, ErrorMetric::difference};
    const GroupedErrors g = partition_errors(e, Labels{"a", "a", "b", "b"});
    REQUIRE(g.groups.size() == 2);
    CHECK(g.groups[0].label == "a");
    CHECK(g.groups[0].values == Vec{1, 2});
    CHECK(g.groups[1].values == Vec{3, 4});
    CHECK(g.total() == 4);

    const GroupedErrors stable = partition_errors(e, Labels{"b", "a", "b", "a"});
    CHECK(stable.groups[0].values == Vec{2, 4});
    CHECK(stable.groups[1].values == Vec{1, 3});

    CHECK(partition_errors(e, Labels(4, "x")).groups.size() == 1);
    CHECK_THROWS_AS(partition_errors(e, Labels{"a", "b"}), DataError);

    const GroupedErrors small = partition_errors(e, Labels{"a", "b", "b", "b"}, 2);
    REQUIRE(small.groups.size() == 1);
    CHECK(small.groups[0].label == "b");
    CHECK(small.warnings.size() == 1);
    CHECK_THROWS_AS(partition_errors(e, Labels{"a", "b", "c", "d"}, 2), DataError);
}

TEST_CASE("intersectional labels") {
    const std::vector<Labels> cols{{"Asian", "Caucasian"}, {"F", "M"}};
    CHECK(intersect_labels(cols) == Labels{"Asian|F", "Caucasian|M"});
    const std::vector<Labels> one{{"x", "y", "x"}};
    CHECK(intersect_labels(one) == one[0]);
    const std::vector<Labels> bad{{"a", "b"}, {"c"}};
    CHECK_THROWS_AS(intersect_labels(bad), DataError);
}

TEST_CASE("corrections") {
    const std::vector<std::optional<double>> p{0.01, std::nullopt, 0.04, 0.03};
    const auto none = adjust_pvalues(p, Correction::none);
    CHECK(none == p);
    const auto bonf = adjust_pvalues(p, Correction::bonferroni);
    CHECK(*bonf[0] == doctest::Approx(0.03));
    CHECK_FALSE(bonf[1]);
    CHECK(*bonf[2] == doctest::Approx(0.12));
    CHECK(*bonf[3] == doctest::Approx(0.09));
    const auto holm = adjust_pvalues(p, Correction::holm);
    CHECK(*holm[0] == doctest::Approx(0.03));
    CHECK(*holm[3] == doctest::Approx(0.06));
    CHECK(*holm[2] == doctest::Approx(0.06));  // monotone step-down
    const auto capped = adjust_pvalues(std::vector<std::optional<double>>{0.6, 0.7},
                                       Correction::bonferroni);
    CHECK(*capped[0] == 1.0);
    CHECK(parse_correction("holm") == Correction::holm);
    CHECK_FALSE(parse_correction("fdr"));
}

TEST_CASE("config validation") {
    AuditConfig c;
    CHECK_NOTHROW(validate(c));
    c.alpha = 0.02;
    CHECK_THROWS_AS(validate(c), UsageError);
    c = AuditConfig{};
    c.permutations = 0;
    CHECK_THROWS_AS(validate(c), UsageError);
    c = AuditConfig{};
    c.min_group_size = 0;
    CHECK_THROWS_AS(validate(c), UsageError);
}

TEST_CASE("one group is an error") {
    const Data d = normal_groups(1, 30, {0.0}, {"only"});
    CHECK_THROWS_AS(audit(d, quick(0.05)), DataError);
}

TEST_CASE("gatekeeping and verdict") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Data d = normal_groups(seed, 40, {0.0, 0.0, seed % 2 ? 0.8 : 0.0}, {"a", "b", "c"});
        const AuditReport r = audit(d, quick(0.05, 200));
        CHECK((r.verdict == Verdict::unfair) == r.ad.reject);
        CHECK(r.posthoc.empty() == (r.verdict == Verdict::fair));
        if (r.verdict == Verdict::unfair) CHECK(r.posthoc.size() == 3);
        CHECK(r.groups.size() == 3);
    }
}

TEST_CASE("two-group mean shift is flagged on the mean") {
    int mean_sig = 0, others_quiet = 0, others_total = 0;
    const int trials = 15;
    for (int t = 0; t < trials; ++t) {
        const Data d = normal_groups(1000 + t, 200, {0.0, 1.0}, {"x", "y"});
        const AuditReport r = audit(d, quick(0.01, 2000));
        REQUIRE(r.verdict == Verdict::unfair);
        REQUIRE(r.posthoc.size() == 1);
        const auto& p = r.posthoc[0].test.p_values;
        if (*p[0] <= 0.01) ++mean_sig;
        for (std::size_t s = 1; s < 4; ++s) {
            ++others_total;
            if (*p[s] > 0.05) ++others_quiet;
        }
    }
    CHECK(mean_sig == trials);
    CHECK(others_quiet * 2 > others_total);
}

TEST_CASE("fair data is mostly judged fair") {
    const int trials = 200;
    int fair = 0;
    for (int t = 0; t < trials; ++t) {
        const Data d = normal_groups(substream_seed(77, t), 500, {0.0, 0.0}, {"x", "y"});
        if (audit(d, quick(0.05, 100)).verdict == Verdict::fair) ++fair;
    }
    // 3 sigma binomial band around 0.95.
    const double sd = std::sqrt(0.95 * 0.05 / trials);
    CHECK(std::abs(fair / double(trials) - 0.95) <= 3 * sd);
}

TEST_CASE("determinism, label-rename invariance, subset consistency") {
    const Data d = normal_groups(5, 60, {0.0, 0.9, 0.3}, {"p", "q", "r"});
    const AuditConfig c = quick(0.05, 3000);
    const AuditReport r1 = audit(d, c);
    const AuditReport r2 = audit(d, c);
    REQUIRE(r1.verdict == Verdict::unfair);
    REQUIRE(r1.posthoc.size() == r2.posthoc.size());
    for (std::size_t i = 0; i < r1.posthoc.size(); ++i) {
        CHECK(r1.posthoc[i].test.p_values == r2.posthoc[i].test.p_values);
        CHECK(r1.posthoc[i].test.seed == r2.posthoc[i].test.seed);
    }

    // Rename p->zz, q->aa, r->mm: reorders groups but not the numbers.
    Data renamed = d;
    for (auto& l : renamed.labels) l = l == "p" ? "zz" : l == "q" ? "aa" : "mm";
    const AuditReport rr = audit(renamed, c);
    CHECK(rr.ad.a2 == r1.ad.a2);
    CHECK(rr.ad.p_value == r1.ad.p_value);
    CHECK(rr.verdict == r1.verdict);
    for (const auto& pair : r1.posthoc) {
        const auto map = [](const std::string& l) {
            return std::string(l == "p" ? "zz" : l == "q" ? "aa" : "mm");
        };
        const std::string a = map(pair.test.group_a), b = map(pair.test.group_b);
        bool found = false;
        for (const auto& other : rr.posthoc) {
            if ((other.test.group_a == a && other.test.group_b == b) ||
                (other.test.group_a == b && other.test.group_b == a)) {
                found = true;
                CHECK(other.test.p_values == pair.test.p_values);
                CHECK(other.significant == pair.significant);
            }
        }
        CHECK(found);
    }

    // Each pair equals a standalone test with its derived seed.
    const GroupedErrors g = partition_errors(ErrorVector{d.errors, ErrorMetric::identity}, d.labels);
    for (const auto& pair : r1.posthoc) {
        const Vec* a = nullptr;
        const Vec* b = nullptr;
        for (const auto& grp : g.groups) {
            if (grp.label == pair.test.group_a) a = &grp.values;
            if (grp.label == pair.test.group_b) b = &grp.values;
        }
        REQUIRE((a && b));
        CHECK(pair.test.seed == pair_seed(c.seed, *a, *b));
        const PermutationResult alone = permutation_test(*a, *b, c.permutations, pair.test.seed);
        CHECK(alone.p_values == pair.test.p_values);
        CHECK(pair.adjusted == pair.test.p_values);
    }

    // Dropping a group leaves the other pairs untouched.
    Data two;
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        if (d.labels[i] == "r") continue;
        two.errors.push_back(d.errors[i]);
        two.labels.push_back(d.labels[i]);
    }
    const AuditReport rt = audit(two, c);
    if (rt.verdict == Verdict::unfair) {
        for (const auto& pair : r1.posthoc)
            if (pair.test.group_a != "r" && pair.test.group_b != "r")
                CHECK(pair.test.p_values == rt.posthoc[0].test.p_values);
    }
}

TEST_CASE("corrections change flags, not raw p-values") {
    const Data d = normal_groups(9, 80, {0.0, 0.6, 0.2, 0.4}, {"a", "b", "c", "d"});
    AuditConfig c = quick(0.05, 2000);
    const AuditReport raw = audit(d, c);
    REQUIRE(raw.verdict == Verdict::unfair);
    c.correction = Correction::bonferroni;
    const AuditReport bonf = audit(d, c);
    c.correction = Correction::holm;
    const AuditReport holm = audit(d, c);
    std::size_t family = 0, n_raw = 0, n_bonf = 0, n_holm = 0;
    for (std::size_t i = 0; i < raw.posthoc.size(); ++i) {
        CHECK(raw.posthoc[i].test.p_values == bonf.posthoc[i].test.p_values);
        for (std::size_t s = 0; s < 4; ++s) {
            if (!raw.posthoc[i].test.p_values[s]) continue;
            ++family;
            n_raw += raw.posthoc[i].significant[s];
            n_bonf += bonf.posthoc[i].significant[s];
            n_holm += holm.posthoc[i].significant[s];
            CHECK(*bonf.posthoc[i].adjusted[s] >= *holm.posthoc[i].adjusted[s]);
            CHECK(*holm.posthoc[i].adjusted[s] >= *raw.posthoc[i].adjusted[s]);
        }
    }
    CHECK(family == 24);
    CHECK(n_bonf <= n_holm);
    CHECK(n_holm <= n_raw);
}

TEST_CASE("audit from predictions computes the configured metric") {
    const Vec truth{100, 200, 400, 100, 200, 400, 100, 200, 400, 100, 200, 400};
    Vec pred = truth;
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] *= i < 6 ? 1.1 : 0.8;
    const Labels labels{"a", "a", "a", "a", "a", "a", "b", "b", "b", "b", "b", "b"};
    AuditConfig c;
    c.min_group_size = 1;
    c.alpha = 0.05;
    c.permutations = 500;
    const AuditReport r = run_audit(pred, truth, labels, c);
    CHECK(r.groups[0].moments.mean == doctest::Approx(0.1));
    CHECK(r.groups[1].moments.mean == doctest::Approx(-0.2));
    CHECK(r.groups[1].mean_abs_error == doctest::Approx(0.2));
    CHECK(r.verdict == Verdict::unfair);
}
