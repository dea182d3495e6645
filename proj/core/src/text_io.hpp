#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace netrisk::detail {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view text) noexcept;

// Splits into lines, dropping a trailing '\r' on each.
std::vector<std::string_view> lines(std::string_view text);

// Throws std::invalid_argument on anything but a full finite decimal number.
double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

// Shortest representation that reads back to the same double.
std::string format_double(double value);
// Fixed 17 significant digits.
std::string format_double17(double value);

}  // namespace netrisk::detail
