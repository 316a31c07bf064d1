#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace besense::io {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Writes to "<path>.tmp" and renames over path; creates parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Lines without trailing '\r'/'\n'.
std::vector<std::string> split_lines(std::string_view text);

/// Splits on ',' and trims surrounding blanks from every field.
std::vector<std::string_view> split_fields(std::string_view line);

std::string_view trim(std::string_view s);

/// Parses a full field as a double; throws Parse naming file, line and column.
double parse_double(std::string_view field, std::string_view where, std::size_t line,
                    std::string_view column);
long long parse_int(std::string_view field, std::string_view where, std::size_t line,
                    std::string_view column);

/// Extracts "<key>=<value>" from a '#' header line; empty if missing.
std::string header_value(std::string_view header, std::string_view key);

}  // namespace besense::io
