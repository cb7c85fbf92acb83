#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fragtk {

/// Split one CSV line on commas (no quoting; the toolkit's formats never
/// contain embedded commas).
std::vector<std::string> split_csv_line(const std::string& line);

/// Parse a timestamp cell as epoch-hours. Accepts a plain integer or an
/// ISO-8601 instant ("YYYY-MM-DD HH:MM[:SS]", 'T' separator and trailing 'Z'
/// allowed) that falls exactly on an hour boundary.
std::int64_t parse_timestamp_hours(const std::string& cell);

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double v);

/// Fixed-format helper for report tables.
std::string format_double(double v, int precision);

/// Whole file as lines; throws MissingInputError when absent.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Whole file as one string; throws MissingInputError when absent.
std::string read_text_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);

/// FNV-1a 64-bit over a byte string / file contents (manifest corruption checks).
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

} // namespace fragtk
