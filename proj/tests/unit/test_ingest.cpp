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
#include <sstream>
#include <string>

#include <doctest.h>

#include "parity/error.hpp"
#include "parity/ingest.hpp"

using namespace parity;

namespace {

Schema basic() {
    Schema s;
    s.pred_columns = {"pred"};
    s.truth_column = "truth";
    s.label_columns = {"group"};
    return s;
}

Dataset parse(const std::string& text, const Schema& s = basic()) {
    std::istringstream in(text);
    return parse_csv(in, s);
}

std::string error_of(const std::string& text, const Schema& s = basic()) {
    try {
        parse(text, s);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("load a small file") {
    const Dataset d = parse("pred,truth,group,note\n1.5,1,a,x\n2,2.5,b, y \n3,3,a,\n");
    CHECK(d.rows == 3);
    CHECK(d.numeric("pred")[1] == 2.0);
    CHECK(d.truth()[0] == 1.0);
    CHECK(d.text("group")[1] == "b");
    CHECK(d.text("note")[1] == "y");
    CHECK(d.column("note").role == ColumnRole::aux);
    CHECK(d.names(ColumnRole::pred) == std::vector<std::string>{"pred"});
}

TEST_CASE("quoted fields, BOM, CRLF and other delimiters") {
    const Dataset d = parse("\xEF\xBB\xBFpred,truth,group\r\n1,2,\"a, \"\"b\"\"\"\r\n");
    CHECK(d.rows == 1);
    CHECK(d.text("group")[0] == "a, \"b\"");
    Schema s = basic();
    s.delimiter = ';';
    CHECK(parse("pred;truth;group\n1;2;g\n", s).rows == 1);
}

TEST_CASE("errors name the column and row") {
    CHECK(error_of("pred,group\n1,a\n").find("truth") != std::string::npos);
    const std::string na = error_of("pred,truth,group\n1,1,a\nN/A,2,b\n");
    CHECK(na.find("row 2") != std::string::npos);
    CHECK(na.find("pred") != std::string::npos);
    CHECK_FALSE(error_of("pred,truth,group\n1,,a\n").empty());
    CHECK_FALSE(error_of("pred,truth,group\n1,2,\n").empty());
    CHECK_FALSE(error_of("pred,truth,group\ninf,2,a\n").empty());
    CHECK_FALSE(error_of("pred,truth,group\n1,2\n").empty());
    CHECK_FALSE(error_of("pred,truth,group\n").empty());
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", basic()), DataError);
}

TEST_CASE("write then read round-trips bit-exactly") {
    Dataset d = parse("pred,truth,group\n0.1,3,a\n1e-300,2.5,b\n");
    d.columns[0].numeric[0] = 0.1 + 0.2;
    d.columns[1].numeric[1] = 1.0 / 3.0;
    const std::string text = write_csv(d);
    const Dataset back = parse(text);
    CHECK(back.rows == d.rows);
    CHECK(back.names(ColumnRole::pred) == d.names(ColumnRole::pred));
    for (std::size_t c = 0; c < d.columns.size(); ++c) {
        CHECK(back.columns[c].name == d.columns[c].name);
        CHECK(back.columns[c].numeric == d.columns[c].numeric);
        CHECK(back.columns[c].text == d.columns[c].text);
    }
    CHECK(write_csv(back) == text);
}

TEST_CASE("binary labels by threshold") {
    const std::vector<double> v{0.70, 0.40};
    CHECK(derive_binary_labels(v, 0.598, "W", "N") == std::vector<std::string>{"W", "N"});
    const std::vector<double> eq{0.598};
    CHECK(derive_binary_labels(eq, 0.598, "W", "N") == std::vector<std::string>{"N"});
    CHECK(derive_binary_labels(std::vector<double>{}, 0.5, "W", "N").empty());

    const LabelThreshold t = parse_label_threshold("prop:0.598:W:N");
    CHECK(t.column == "prop");
    CHECK(t.threshold == 0.598);
    CHECK(t.above == "W");
    CHECK(t.at_or_below == "N");
    CHECK_THROWS_AS(parse_label_threshold("prop:x:W:N"), UsageError);
    CHECK_THROWS_AS(parse_label_threshold("prop:0.5:W"), UsageError);
}

TEST_CASE("minimum-truth filter") {
    const Dataset d = parse("pred,truth,group\n1,99,a\n2,100,b\n3,250,a\n");
    const Dataset f = filter_min_truth(d, 100);
    CHECK(f.rows == 2);
    CHECK(f.truth()[0] == 100);
    CHECK(f.truth()[1] == 250);
    CHECK(f.text("group")[0] == "b");
    CHECK(f.removed_rows == 1);

    const Dataset again = filter_min_truth(f, 100);
    CHECK(again.rows == f.rows);
    CHECK(again.removed_rows == f.removed_rows);
    CHECK(write_csv(again) == write_csv(f));

    const Dataset off = filter_min_truth(d, kNoMinTruth);
    CHECK(write_csv(off) == write_csv(d));
    CHECK(off.removed_rows == 0);

    const Dataset none = filter_min_truth(d, 1e9);
    CHECK(none.rows == 0);
    CHECK(none.removed_rows == 3);
}

TEST_CASE("label columns derived after load") {
    Schema s;
    s.pred_columns = {"pred"};
    s.truth_column = "truth";
    s.label_source_columns = {"prop"};
    Dataset d = parse("pred,truth,prop\n1,1,0.7\n2,2,0.4\n", s);
    d.set_label_column("prop_label", derive_binary_labels(d.numeric("prop"), 0.598, "W", "N"));
    CHECK(d.text("prop_label")[0] == "W");
    CHECK(d.column("prop_label").role == ColumnRole::label);
}
