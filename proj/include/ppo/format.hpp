#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ppo {

// Shortest text that parses back to exactly `value`.
std::string format_number(double value);

// Whole-token numeric parsing; nullopt on trailing garbage, empty input or non-finite values.
std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_integer(std::string_view token);

} // namespace ppo
