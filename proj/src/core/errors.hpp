#pragma once

#include <stdexcept>
#include <string>

namespace pedrisk {

// Error taxonomy mirrors the C API status codes: parse/validation problems
// are user-input faults, numeric errors are degenerate math (zero likelihood,
// singular fit), argument errors are misuse of the library itself.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg)
      : std::runtime_error(msg), line_number(0) {}
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  std::size_t line_number;  // 0 when the input has no line structure
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pedrisk
