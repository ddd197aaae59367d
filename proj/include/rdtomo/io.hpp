// Copyright 2026 The rdtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// File formats. Every CSV starts with a "# rdtomo <kind> v<version>" line,
// then a header row; further '#' lines are comments.

#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rdtomo/estimator.hpp"
#include "rdtomo/scan_simulator.hpp"

namespace rdtomo {

inline constexpr int kCsvVersion = 1;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based line of each row in the source

    std::size_t column(std::string_view name) const;
};

class CsvBuilder {
  public:
    CsvBuilder(std::string_view kind, std::vector<std::string> columns, std::span<const std::string> comments = {});
    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
    const std::string& str() const { return text_; }

  private:
    std::size_t width_;
    std::string text_;
};

/// Parses CSV text of the given kind. Throws ParseError naming the line.
CsvTable parse_csv(std::string_view text, std::string_view kind, std::span<const std::string> required_columns);

// Scan samples: index, delta (DC grid units), j_cos, j_sin.
std::string scan_csv(std::span<const ScanRecord> records);
std::vector<ScanRecord> parse_scan_csv(std::string_view text);

// DC profile: delta (grid units), level.
std::string dc_csv(std::span<const double> grid, std::span<const double> level);
std::pair<std::vector<double>, std::vector<double>> parse_dc_csv(std::string_view text);

}  // namespace rdtomo
