#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spatial {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: invalid object, unknown category, malformed settings.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

struct SourceLocation {
  int line = 1;
  int column = 1;
};

/// Syntax error in a pipeline, taxonomy or fact document. `what()` carries
/// the location prefix ("3:14: ...").
class ParseError : public Error {
 public:
  ParseError(SourceLocation where, const std::string& message)
      : Error(std::to_string(where.line) + ":" + std::to_string(where.column) + ": " + message),
        where_(where) {}

  SourceLocation where() const { return where_; }

 private:
  SourceLocation where_;
};

/// Failure while executing a pipeline; `step()` is 1-based.
class EvaluationError : public Error {
 public:
  EvaluationError(std::size_t step, const std::string& message)
      : Error("step " + std::to_string(step) + ": " + message), step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace spatial
