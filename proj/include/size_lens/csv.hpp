#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Minimal RFC 4180 style CSV support shared by the readers and writers.
namespace size_lens::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// Splits text into records. Blank lines are skipped. Throws ParseError on an
/// unterminated quoted field.
std::vector<Record> parse(std::string_view text, const std::string& source);

/// Reads and parses a file; a leading UTF-8 BOM is ignored. Throws IoError.
std::vector<Record> read_file(const std::string& path);

/// Writes text to a file. Throws IoError.
void write_file(const std::string& path, std::string_view text);

std::string_view trim(std::string_view s);

/// Quotes when the field is empty or contains a delimiter, quote, newline, or
/// surrounding whitespace.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

/// Full numeric parse of a trimmed field; nullopt on garbage. Accepts nan/inf.
std::optional<double> parse_number(std::string_view field);

/// "%.17g": round-trips every double.
std::string format_exact(double value);

/// Fixed-point with `decimals` digits; never prints a negative zero.
std::string format_fixed(double value, int decimals);

}  // namespace size_lens::csv
