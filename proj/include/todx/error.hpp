#pragma once

#include <stdexcept>
#include <string>

namespace todx {

enum class ErrorKind {
  Syntax,
  Arity,
  UnknownSymbol,
  InvalidSignature,
  DuplicateId,
  DuplicateEquality,
  UnknownId,
  MalformedEquality,
  Precondition,
  StepCap,
  Internal,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Script errors carry a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, const std::string& what, int line, int column)
      : Error(kind, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace todx
