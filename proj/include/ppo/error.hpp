#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppo {

// Malformed or inconsistent input: bad files, length mismatches, parse failures.
class InputError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

// Instance text that fails to parse. line() is 1-based, 0 when the failure is not tied to a line.
class ParseError : public InputError {
public:
	ParseError(std::size_t line, const std::string &what)
	    : InputError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {
	}

	std::size_t line() const noexcept {
		return line_;
	}

private:
	std::size_t line_;
};

// Well-formed input whose content violates a domain rule (infeasible schedule, degenerate metric).
class DomainError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

} // namespace ppo
