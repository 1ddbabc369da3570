#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace faasprof::csv {

using Row = std::vector<std::string>;

// RFC-4180-ish field splitting: commas, double-quoted fields with "" escapes.
Row split_line(std::string_view line);

std::string join_row(const Row& fields);

struct Table {
  Row header;
  std::vector<Row> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

// Reads a whole file. Blank lines are skipped; rows are returned as-is (field
// counts are not checked here).
Table read_file(const std::string& path);

void write_file(const std::string& path, const Row& header, const std::vector<Row>& rows);

// Fixed six-decimal rendering used by every emitted CSV; empty for NaN.
std::string format_number(double v);
std::string format_optional(std::optional<double> v);

std::optional<double> parse_number(std::string_view text);

}  // namespace faasprof::csv
