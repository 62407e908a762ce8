#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hisim {

// Malformed or invariant-violating input data (trace files, series, profiles).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters: out-of-range beta/theta, bad config keys, bad flags.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A record-level failure with the 1-based line it occurred on.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// An operation received a trace of the wrong kind (binary vs multiclass).
class KindMismatch : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace hisim
