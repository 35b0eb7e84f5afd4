#pragma once

#include <stdexcept>
#include <string>

namespace stacksim {

// Bad data handed to an operation (dimension mismatch, invalid distribution, ...).
struct invalid_input_error : std::runtime_error {
  explicit invalid_input_error(const std::string& what) : std::runtime_error(what) {}
};

// A policy or experiment configuration that cannot be run as requested.
struct invalid_config_error : std::runtime_error {
  explicit invalid_config_error(const std::string& what) : std::runtime_error(what) {}
};

// Request exceeds an enforced capability cap (e.g. support enumeration size).
struct unsupported_size_error : std::runtime_error {
  explicit unsupported_size_error(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant failed (e.g. an LP that must be feasible was not).
struct internal_error : std::logic_error {
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

/// Malformed input file; carries a "file:line: message" diagnostic.
struct parse_error : std::runtime_error {
  parse_error(const std::string& file, int line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        line(line) {}
  int line;
};

}  // namespace stacksim
