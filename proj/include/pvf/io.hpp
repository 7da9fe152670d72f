#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pvf {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Parses a full token as a double; false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);

/// Writes to a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

std::string_view trim(std::string_view text);

}  // namespace pvf
