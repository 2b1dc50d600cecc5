#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mribow {

/// Shortest round-trip decimal form of a double (std::to_chars), locale-free.
std::string format_double(double v);

/// Strict full-string parses; throw DataError with `what` in the message.
double parse_double_strict(std::string_view s, std::string_view what = "number");
long long parse_int_strict(std::string_view s, std::string_view what = "number");
std::uint64_t parse_u64_strict(std::string_view s, std::string_view what = "number");

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace mribow
