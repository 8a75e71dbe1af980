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

#include "parity/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "parity/error.hpp"

namespace parity {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Splits one record. Supports double-quoted fields with "" escapes; a quoted
// field may not span lines.
std::vector<std::string> split_record(std::string_view line, char delim, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && trim(cur).empty()) {
            cur.clear();
            quoted = true;
        } else if (c == delim) {
            fields.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quote");
    fields.emplace_back(trim(cur));
    return fields;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
    const auto where = [&] { return "row " + std::to_string(row) + ", column '" + column + "'"; };
    if (cell.empty()) throw DataError("empty cell at " + where());
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw DataError("cannot parse '" + cell + "' as a number at " + where());
    }
    if (!std::isfinite(v)) throw DataError("non-finite value '" + cell + "' at " + where());
    return v;
}

ColumnRole role_for(const std::string& name, const Schema& schema) {
    const auto in = [&](const std::vector<std::string>& v) {
        return std::find(v.begin(), v.end(), name) != v.end();
    };
    if (name == schema.truth_column) return ColumnRole::truth;
    if (in(schema.pred_columns)) return ColumnRole::pred;
    if (in(schema.label_source_columns)) return ColumnRole::label_source;
    if (in(schema.label_columns)) return ColumnRole::label;
    return ColumnRole::aux;
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s, char delim) {
    if (s.find_first_of(std::string{delim, '"', '\n', '\r'}) == std::string::npos &&
        trim(s) == s) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

const Column& Dataset::column(std::string_view name) const {
    for (const auto& c : columns) {
        if (c.name == name) return c;
    }
    throw DataError("missing column '" + std::string(name) + "'");
}

bool Dataset::has_column(std::string_view name) const noexcept {
    return std::any_of(columns.begin(), columns.end(),
                       [&](const Column& c) { return c.name == name; });
}

std::span<const double> Dataset::numeric(std::string_view name) const {
    const Column& c = column(name);
    if (!c.is_numeric()) throw DataError("column '" + c.name + "' is not numeric");
    return c.numeric;
}

std::span<const std::string> Dataset::text(std::string_view name) const {
    const Column& c = column(name);
    if (c.is_numeric()) throw DataError("column '" + c.name + "' is not a text column");
    return c.text;
}

std::span<const double> Dataset::truth() const {
    for (const auto& c : columns) {
        if (c.role == ColumnRole::truth) return c.numeric;
    }
    throw DataError("dataset has no truth column");
}

std::vector<std::string> Dataset::names(ColumnRole role) const {
    std::vector<std::string> out;
    for (const auto& c : columns) {
        if (c.role == role) out.push_back(c.name);
    }
    return out;
}

void Dataset::set_label_column(const std::string& name, std::vector<std::string> labels) {
    if (labels.size() != rows) {
        throw DataError("label column '" + name + "' has " + std::to_string(labels.size()) +
                        " entries for " + std::to_string(rows) + " rows");
    }
    for (auto& c : columns) {
        if (c.name == name && c.role == ColumnRole::label) {
            c.text = std::move(labels);
            return;
        }
    }
    columns.push_back({name, ColumnRole::label, {}, std::move(labels)});
}

Dataset parse_csv(std::istream& in, const Schema& schema) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_record(line, schema.delimiter, line_no);
            break;
        }
    }
    if (header.empty()) throw DataError("input has no header row");
    if (!header.front().empty() && header.front().rfind("\xEF\xBB\xBF", 0) == 0) {
        header.front().erase(0, 3);
    }
    if (std::set<std::string>(header.begin(), header.end()).size() != header.size()) {
        throw DataError("duplicate column names in header");
    }

    const auto require = [&](const std::string& name) {
        if (std::find(header.begin(), header.end(), name) == header.end()) {
            throw DataError("missing column '" + name + "'");
        }
    };
    if (schema.truth_column.empty()) throw UsageError("schema names no truth column");
    if (schema.pred_columns.empty()) throw UsageError("schema names no prediction column");
    require(schema.truth_column);
    for (const auto& n : schema.pred_columns) require(n);
    for (const auto& n : schema.label_columns) require(n);
    for (const auto& n : schema.label_source_columns) require(n);

    Dataset data;
    for (const auto& name : header) data.columns.push_back({name, role_for(name, schema), {}, {}});

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_record(line, schema.delimiter, line_no);
        const std::size_t row = data.rows + 1;
        if (fields.size() != header.size()) {
            throw DataError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                            ") has " + std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            Column& col = data.columns[c];
            if (col.is_numeric()) {
                col.numeric.push_back(parse_number(fields[c], row, col.name));
            } else {
                if (col.role == ColumnRole::label && fields[c].empty()) {
                    throw DataError("empty cell at row " + std::to_string(row) + ", column '" +
                                    col.name + "'");
                }
                col.text.push_back(fields[c]);
            }
        }
        ++data.rows;
    }
    if (data.rows == 0) throw DataError("input has no data rows");
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_csv(in, schema);
}

std::string write_csv(const Dataset& data, char delimiter) {
    std::string out;
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        if (c) out.push_back(delimiter);
        out += quote_if_needed(data.columns[c].name, delimiter);
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < data.rows; ++r) {
        for (std::size_t c = 0; c < data.columns.size(); ++c) {
            if (c) out.push_back(delimiter);
            const Column& col = data.columns[c];
            out += col.is_numeric() ? format_number(col.numeric[r])
                                    : quote_if_needed(col.text[r], delimiter);
        }
        out.push_back('\n');
    }
    return out;
}

std::vector<std::string> derive_binary_labels(std::span<const double> values, double threshold,
                                              const std::string& above_label,
                                              const std::string& at_or_below_label) {
    std::vector<std::string> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw DataError("non-finite value at row " + std::to_string(i + 1) +
                            " in threshold labeling");
        }
        out.push_back(values[i] > threshold ? above_label : at_or_below_label);
    }
    return out;
}

LabelThreshold parse_label_threshold(std::string_view text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(':', start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (parts.size() != 4 || parts[0].empty() || parts[2].empty() || parts[3].empty()) {
        throw UsageError("--label-threshold expects <column>:<threshold>:<above>:<below>, got '" +
                         std::string(text) + "'");
    }
    LabelThreshold lt;
    lt.column = parts[0];
    const char* b = parts[1].data();
    const char* e = b + parts[1].size();
    const auto [ptr, ec] = std::from_chars(b, e, lt.threshold);
    if (ec != std::errc() || ptr != e || !std::isfinite(lt.threshold)) {
        throw UsageError("invalid threshold '" + parts[1] + "' in --label-threshold");
    }
    lt.above = parts[2];
    lt.at_or_below = parts[3];
    return lt;
}

Dataset filter_min_truth(const Dataset& data, double min_truth) {
    const auto truth = data.truth();
    std::vector<std::size_t> keep;
    keep.reserve(data.rows);
    for (std::size_t r = 0; r < data.rows; ++r) {
        if (truth[r] >= min_truth) keep.push_back(r);
    }

    Dataset out;
    out.rows = keep.size();
    out.removed_rows = data.removed_rows + (data.rows - keep.size());
    for (const auto& col : data.columns) {
        Column c{col.name, col.role, {}, {}};
        if (col.is_numeric()) {
            c.numeric.reserve(keep.size());
            for (std::size_t r : keep) c.numeric.push_back(col.numeric[r]);
        } else {
            c.text.reserve(keep.size());
            for (std::size_t r : keep) c.text.push_back(col.text[r]);
        }
        out.columns.push_back(std::move(c));
    }
    return out;
}

}  // namespace parity
