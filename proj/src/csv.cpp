#include "nemlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace nemlab {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  return {buf, ptr};
}

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() &&
         (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);

  std::vector<double> values;
  std::string line;
  std::size_t index = 0;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (first) {
      first = false;
      if (!column.empty()) {
        bool found = false;
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (fields[i] == column) {
            index = i;
            found = true;
            break;
          }
        }
        if (!found) throw std::runtime_error("column '" + column + "' not found in " + path);
        continue;
      }
      if (fields.size() != 1) {
        throw std::runtime_error(path + " has several columns; name one with --column");
      }
      if (!parse_number(fields[0])) continue;  // header line
    }
    if (index >= fields.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": missing column");
    }
    const auto v = parse_number(fields[index]);
    if (!v) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": not a number: '" +
                               fields[index] + "'");
    }
    values.push_back(*v);
  }
  return values;
}

}  // namespace nemlab
