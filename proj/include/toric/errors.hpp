#pragma once

#include <stdexcept>
#include <string>

namespace toric {

// Malformed input (bad JSON, wrong vector length, bad ids). Distinct from
// semantic validation failure, which is reported, not thrown.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};

// Precondition violation: operation applied to data it is not defined on
// (invalid fan, singular map, divergent sum, zero vector energy, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& m) : std::runtime_error(m) {}
};

// An operation was invoked on a fan that failed validation.
struct InvalidFanError : DomainError {
  explicit InvalidFanError(const std::string& m) : DomainError(m) {}
};

// A configured resource cap was exceeded (basis size, enumeration count).
struct LimitError : std::runtime_error {
  explicit LimitError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace toric
