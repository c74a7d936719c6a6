#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tteq {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (terms, transducer files, paths).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A symbol used with the wrong number of children.
class ArityError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Malformed document in the line-based file format.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line, const std::string& file = {})
      : Error((file.empty() ? "" : file + ": ") + "line " + std::to_string(line) + ": " + what),
        detail_(what),
        line_(line) {}
  const std::string& detail() const { return detail_; }
  std::size_t line() const { return line_; }

 private:
  std::string detail_;
  std::size_t line_;
};

// A symbol that is not part of the governing alphabet.
class AlphabetError : public Error {
 public:
  using Error::Error;
};

// An argument that violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A configured budget (recursion depth, state count, string length) was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A self-check failed; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tteq
