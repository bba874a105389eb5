#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace warp {

/// Half-open byte range into a source string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct LineCol {
  std::size_t line = 1;
  std::size_t column = 1;
};

LineCol line_col_at(std::string_view source, std::size_t offset);

/// Formats "line:col: message" for a span in the given source.
std::string format_diagnostic(std::string_view source, Span span, std::string_view message);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lexing, parsing, and type/lowering failures all carry a source span.
class CompileError : public Error {
 public:
  CompileError(std::string message, Span span) : Error(std::move(message)), span_(span) {}
  Span span() const { return span_; }

 private:
  Span span_;
};

class LexError : public CompileError {
 public:
  using CompileError::CompileError;
};

class ParseError : public CompileError {
 public:
  using CompileError::CompileError;
};

class TypeError : public CompileError {
 public:
  using CompileError::CompileError;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

/// Numeric failure during evaluation; `where` names the node or statement.
class EvalError : public Error {
 public:
  EvalError(std::string message, std::string where)
      : Error(std::move(message)), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace warp
