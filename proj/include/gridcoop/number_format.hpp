#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace gridcoop {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-string parse; nullopt on any trailing garbage or empty input.
std::optional<double> parse_double(std::string_view text);

std::optional<long long> parse_integer(std::string_view text);

}  // namespace gridcoop
