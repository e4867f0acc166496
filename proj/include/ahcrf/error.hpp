#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ahcrf {

/// Raised when an operation's preconditions are violated by its arguments.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the file readers. The message names the source and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& detail);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised when training cannot make progress from a non-finite state.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ahcrf
