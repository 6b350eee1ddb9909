#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared across modules.
namespace ivy::text {

// 64-bit FNV-1a over the raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

// Case-insensitive substring search; npos when absent.
std::size_t ifind(std::string_view haystack, std::string_view needle,
                  std::size_t from = 0);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercased maximal runs of ASCII letters and digits.
std::vector<std::string> word_tokens(std::string_view s);

std::size_t word_count(std::string_view s);

// Number of non-blank lines.
std::size_t line_count(std::string_view s);

}  // namespace ivy::text
