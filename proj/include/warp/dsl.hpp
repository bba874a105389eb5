#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warp/graph.hpp"

namespace warp {

enum class TokenKind : std::uint8_t {
  Number,
  Identifier,
  Operator,     // + - * / =
  Punct,        // ( ) , ; .
  KeywordLet,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string_view lexeme;
  Span span;
};

/// Splits source into tokens. `//` comments and whitespace are skipped; the
/// stream always ends with a single End token spanning the final offset.
std::vector<Token> tokenize(std::string_view source);

struct AstExpr;
using AstExprPtr = std::unique_ptr<AstExpr>;

struct AstExpr {
  enum class Kind : std::uint8_t { Number, Ref, Unary, Binary, Call, Swizzle };

  Kind kind = Kind::Number;
  Span span;
  double number = 0.0;        // Number
  std::string name;           // Ref callee / Call name
  char op = 0;                // Unary ('-') / Binary ('+','-','*','/')
  std::string swizzle;        // Swizzle field text, e.g. "xz"
  std::vector<AstExprPtr> args;
};

struct LetBinding {
  std::string name;
  Span span;
  AstExprPtr value;
};

struct Ast {
  std::vector<LetBinding> lets;
  AstExprPtr result;
};

/// Parses a token stream. Precedence: swizzle > unary minus > * / > + -,
/// all binary operators left associative.
Ast parse(std::span<const Token> tokens);

/// A parsed and lowered offset function.
struct WarpProgram {
  std::string source;
  Ast ast;
  ExprGraph graph;
  NodeId offset_root = 0;
  std::vector<InputKind> referenced_inputs;
  /// Graph size right after lowering; everything beyond this was added by
  /// differentiation passes.
  std::size_t value_node_count = 0;
};

/// Type-checks and lowers an AST onto an ExprGraph. Let bindings become
/// shared subgraph nodes; scalar-vector arithmetic splats the scalar.
WarpProgram lower(std::string source, Ast ast);

/// tokenize + parse + lower.
WarpProgram compile_warp(std::string source);

}  // namespace warp
