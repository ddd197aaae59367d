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

#include "rdtomo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

#include "rdtomo/errors.hpp"

namespace rdtomo {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) {
            return out;
        }
        start = comma + 1;
    }
}

std::string version_line(std::string_view kind) {
    return "# rdtomo " + std::string(kind) + " v" + std::to_string(kCsvVersion);
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return i;
        }
    }
    throw std::out_of_range("no column " + std::string(name));
}

CsvBuilder::CsvBuilder(std::string_view kind, std::vector<std::string> columns, std::span<const std::string> comments)
    : width_(columns.size()) {
    text_ = version_line(kind) + "\n";
    for (const std::string& c : comments) {
        text_ += "# " + c + "\n";
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        text_ += (i ? "," : "") + columns[i];
    }
    text_ += "\n";
}

void CsvBuilder::row(std::span<const double> values) {
    if (values.size() != width_) {
        throw std::invalid_argument("CSV row width does not match the header");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            text_ += ',';
        }
        text_ += format_double(values[i]);
    }
    text_ += '\n';
}

CsvTable parse_csv(std::string_view text, std::string_view kind, std::span<const std::string> required_columns) {
    CsvTable table;
    std::size_t line_no = 0;
    bool have_version = false;
    bool have_header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        const bool terminated = end != std::string_view::npos;
        if (!terminated) {
            end = text.size();
        }
        const std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (!have_version) {
                const std::string prefix = "# rdtomo " + std::string(kind) + " v";
                if (line.substr(0, prefix.size()) != prefix) {
                    throw ParseError("expected a '" + prefix + "N' version line", line_no);
                }
                int version = 0;
                const std::string_view rest = line.substr(prefix.size());
                const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), version);
                if (res.ec != std::errc() || res.ptr != rest.data() + rest.size()) {
                    throw ParseError("malformed version line", line_no);
                }
                if (version != kCsvVersion) {
                    throw ParseError("unsupported " + std::string(kind) + " format version " +
                                         std::to_string(version),
                                     line_no);
                }
                have_version = true;
            }
            continue;
        }
        if (!have_version) {
            throw ParseError("missing '# rdtomo " + std::string(kind) + " v" + std::to_string(kCsvVersion) +
                                 "' version line",
                             line_no);
        }
        if (!have_header) {
            for (std::string_view f : split(line)) {
                table.columns.emplace_back(f);
            }
            for (const std::string& req : required_columns) {
                bool found = false;
                for (const std::string& c : table.columns) {
                    found = found || c == req;
                }
                if (!found) {
                    throw ParseError("header lacks column '" + req + "'", line_no);
                }
            }
            have_header = true;
            continue;
        }
        if (!terminated) {
            throw ParseError("truncated row (no line terminator)", line_no);
        }
        const auto fields = split(line);
        if (fields.size() != table.columns.size()) {
            throw ParseError("expected " + std::to_string(table.columns.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        std::vector<double> values(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string_view f = fields[i];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), values[i]);
            if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
                throw ParseError("field '" + table.columns[i] + "' is not a number: '" + std::string(f) + "'",
                                 line_no);
            }
        }
        table.rows.push_back(std::move(values));
        table.line_numbers.push_back(line_no);
    }
    if (!have_header) {
        throw ParseError("no header row", line_no);
    }
    return table;
}

std::string scan_csv(std::span<const ScanRecord> records) {
    CsvBuilder csv("scan", {"index", "delta", "j_cos", "j_sin"});
    for (const ScanRecord& r : records) {
        csv.row({static_cast<double>(r.index), r.delta, r.j_cos, r.j_sin});
    }
    return csv.str();
}

std::vector<ScanRecord> parse_scan_csv(std::string_view text) {
    static const std::vector<std::string> required = {"index", "delta", "j_cos", "j_sin"};
    const CsvTable t = parse_csv(text, "scan", required);
    const std::size_t ci = t.column("index");
    const std::size_t cd = t.column("delta");
    const std::size_t cc = t.column("j_cos");
    const std::size_t cs = t.column("j_sin");
    std::vector<ScanRecord> out;
    out.reserve(t.rows.size());
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& row = t.rows[k];
        const double idx = row[ci];
        if (!(idx >= 0.0) || idx != std::floor(idx) || idx > 9.0e15) {
            throw ParseError("index must be a non-negative integer", t.line_numbers[k]);
        }
        if (!out.empty() && static_cast<std::size_t>(idx) <= out.back().index) {
            throw ParseError("indices must increase strictly", t.line_numbers[k]);
        }
        out.push_back({static_cast<std::size_t>(idx), row[cd], row[cc], row[cs]});
    }
    return out;
}

std::string dc_csv(std::span<const double> grid, std::span<const double> level) {
    CsvBuilder csv("dc", {"delta", "level"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.row({grid[i], level[i]});
    }
    return csv.str();
}

std::pair<std::vector<double>, std::vector<double>> parse_dc_csv(std::string_view text) {
    static const std::vector<std::string> required = {"delta", "level"};
    const CsvTable t = parse_csv(text, "dc", required);
    const std::size_t cd = t.column("delta");
    const std::size_t cl = t.column("level");
    std::vector<double> grid;
    std::vector<double> level;
    for (const auto& row : t.rows) {
        grid.push_back(row[cd]);
        level.push_back(row[cl]);
    }
    return {std::move(grid), std::move(level)};
}

}  // namespace rdtomo
