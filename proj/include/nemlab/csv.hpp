#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nemlab {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);

/// Strict full-string parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_number(std::string_view text);

/// Splits one CSV line on commas (no quoting: every field we write is numeric
/// or a bare identifier).
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads one numeric column. With an empty `column` the file must have a
/// single column and an optional non-numeric header line; otherwise the
/// header names the column. Throws std::runtime_error on missing files,
/// unknown columns and unparsable cells.
std::vector<double> read_csv_column(const std::string& path, const std::string& column = {});

}  // namespace nemlab
