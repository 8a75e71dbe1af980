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

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace parity {

enum class ColumnRole { pred, truth, label, label_source, aux };

struct Column {
    std::string name;
    ColumnRole role = ColumnRole::aux;
    std::vector<double> numeric;    // pred, truth, label_source
    std::vector<std::string> text;  // label, aux

    bool is_numeric() const noexcept {
        return role == ColumnRole::pred || role == ColumnRole::truth ||
               role == ColumnRole::label_source;
    }
    std::size_t size() const noexcept { return is_numeric() ? numeric.size() : text.size(); }
};

/// Which header names play which role. Columns not named here are carried as
/// verbatim text (role aux).
struct Schema {
    std::vector<std::string> pred_columns;
    std::string truth_column;
    std::vector<std::string> label_columns;
    /// Numeric columns from which labels are derived by thresholding.
    std::vector<std::string> label_source_columns;
    char delimiter = ',';
};

/// Column-oriented table in file column order. Every column has `rows`
/// entries; numeric columns hold only finite values.
struct Dataset {
    std::vector<Column> columns;
    std::size_t rows = 0;
    std::size_t removed_rows = 0;  // rows dropped by filter_min_truth

    const Column& column(std::string_view name) const;  // throws DataError
    bool has_column(std::string_view name) const noexcept;
    std::span<const double> numeric(std::string_view name) const;
    std::span<const std::string> text(std::string_view name) const;
    std::span<const double> truth() const;
    std::vector<std::string> names(ColumnRole role) const;
    /// Appends (or replaces) a label column.
    void set_label_column(const std::string& name, std::vector<std::string> labels);
};

/// Throws DataError naming the column for a missing column, and naming the
/// row and column for an unparseable, non-finite or empty required cell.
Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
Dataset parse_csv(std::istream& in, const Schema& schema);

/// Serializes in column order; numbers use the shortest round-trip form.
std::string write_csv(const Dataset& data, char delimiter = ',');

/// value > threshold -> above_label, else at_or_below_label.
std::vector<std::string> derive_binary_labels(std::span<const double> values, double threshold,
                                              const std::string& above_label,
                                              const std::string& at_or_below_label);

/// `<column>:<threshold>:<above>:<below>`, as accepted by --label-threshold.
struct LabelThreshold {
    std::string column;
    double threshold = 0.0;
    std::string above;
    std::string at_or_below;
};
LabelThreshold parse_label_threshold(std::string_view text);  // throws UsageError

inline constexpr double kNoMinTruth = -std::numeric_limits<double>::infinity();

/// Keeps rows whose truth is >= min_truth and adds the dropped count to
/// removed_rows.
Dataset filter_min_truth(const Dataset& data, double min_truth);

}  // namespace parity
