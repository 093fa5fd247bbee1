#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riskflow {

// Base of every domain error raised by the engine. The CLI maps subclasses
// onto exit codes and the HTTP service onto status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class UnknownPerspective : public Error {
 public:
  using Error::Error;
};

class UnknownReference : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed structured text. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class IterationLimitExceeded : public Error {
 public:
  using Error::Error;
};

class GraphTooLarge : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

// A mitigation would leave the model structurally invalid.
class ActionWouldInvalidate : public Error {
 public:
  using Error::Error;
};

// Stable snake_case name for an error class, shared by CLI and HTTP output.
// Unknown exception types map to "internal".
std::string_view error_code(const std::exception& error) noexcept;

}  // namespace riskflow
