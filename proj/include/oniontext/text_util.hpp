#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace oniontext {

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_ascii_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string to_lower(std::string_view s);

// Strips leading/trailing ASCII whitespace.
std::string trim(std::string_view s);

// trim() plus internal whitespace runs collapsed to a single space.
// This is the canonical form used for label comparison.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

// Whitespace-delimited tokens, empty tokens dropped.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

std::string read_file(const std::filesystem::path& path);

// Minimal CSV reader for the shipped resource tables: comma-separated,
// no quoting, lines starting with '#' and blank lines skipped. Returns
// rows excluding the header.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::size_t expected_columns);

// Resource-file root: explicit argument if non-empty, else the
// ONIONTEXT_DATA_DIR environment variable, else "./data".
std::filesystem::path resolve_data_dir(const std::string& explicit_dir = "");

}  // namespace oniontext
