#include "ppo/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace ppo {

std::string format_number(double value) {
	if (value == 0.0) {
		return "0";
	}
	std::array<char, 64> buf {};
	auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
	return std::string(buf.data(), ptr);
}

std::optional<double> parse_double(std::string_view token) {
	if (token.empty()) {
		return std::nullopt;
	}
	if (token.front() == '+') {
		token.remove_prefix(1);
	}
	double value = 0.0;
	auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
	if (ec != std::errc {} || ptr != token.data() + token.size() || !std::isfinite(value)) {
		return std::nullopt;
	}
	return value;
}

std::optional<long long> parse_integer(std::string_view token) {
	if (token.empty()) {
		return std::nullopt;
	}
	long long value = 0;
	auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
	if (ec != std::errc {} || ptr != token.data() + token.size()) {
		return std::nullopt;
	}
	return value;
}

} // namespace ppo
