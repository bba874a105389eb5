#include <charconv>

#include "warp/dsl.hpp"

namespace warp {

namespace {

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : tokens_(tokens) {}

  Ast run() {
    Ast ast;
    while (peek().kind == TokenKind::KeywordLet) ast.lets.push_back(parse_let());
    ast.result = parse_expr();
    expect_end();
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  const Token& advance() { return tokens_[pos_++]; }

  bool at_operator(char c) const {
    return peek().kind == TokenKind::Operator && peek().lexeme.size() == 1 && peek().lexeme[0] == c;
  }

  bool at_punct(char c) const {
    return peek().kind == TokenKind::Punct && peek().lexeme[0] == c;
  }

  [[noreturn]] void fail(std::string expected) const {
    const Token& t = peek();
    std::string got = t.kind == TokenKind::End ? "end of input" : "'" + std::string(t.lexeme) + "'";
    throw ParseError("expected " + expected + ", found " + got, t.span);
  }

  void expect_punct(char c) {
    if (!at_punct(c)) fail(std::string("'") + c + "'");
    advance();
  }

  void expect_end() {
    if (peek().kind != TokenKind::End) fail("end of input after the offset expression");
  }

  LetBinding parse_let() {
    const Token& kw = advance();  // let
    if (peek().kind != TokenKind::Identifier) fail("a binding name after 'let'");
    const Token& name = advance();
    if (!at_operator('=')) fail("'=' after the binding name");
    advance();
    AstExprPtr value = parse_expr();
    if (!at_punct(';')) fail("';' after the binding value");
    const Token& semi = advance();
    LetBinding let;
    let.name = std::string(name.lexeme);
    let.span = {kw.span.begin, semi.span.end};
    let.value = std::move(value);
    return let;
  }

  AstExprPtr parse_expr() { return parse_additive(); }

  AstExprPtr parse_additive() {
    AstExprPtr lhs = parse_multiplicative();
    while (at_operator('+') || at_operator('-')) {
      char op = advance().lexeme[0];
      AstExprPtr rhs = parse_multiplicative();
      lhs = make_binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  AstExprPtr parse_multiplicative() {
    AstExprPtr lhs = parse_unary();
    while (at_operator('*') || at_operator('/')) {
      char op = advance().lexeme[0];
      AstExprPtr rhs = parse_unary();
      lhs = make_binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  AstExprPtr parse_unary() {
    if (at_operator('-')) {
      const Token& minus = advance();
      AstExprPtr operand = parse_unary();
      auto node = std::make_unique<AstExpr>();
      node->kind = AstExpr::Kind::Unary;
      node->op = '-';
      node->span = {minus.span.begin, operand->span.end};
      node->args.push_back(std::move(operand));
      return node;
    }
    return parse_postfix();
  }

  AstExprPtr parse_postfix() {
    AstExprPtr expr = parse_primary();
    while (at_punct('.')) {
      advance();
      if (peek().kind != TokenKind::Identifier) fail("a swizzle field after '.'");
      const Token& field = advance();
      auto node = std::make_unique<AstExpr>();
      node->kind = AstExpr::Kind::Swizzle;
      node->swizzle = std::string(field.lexeme);
      node->span = {expr->span.begin, field.span.end};
      node->args.push_back(std::move(expr));
      expr = std::move(node);
    }
    return expr;
  }

  AstExprPtr parse_primary() {
    if (peek().kind == TokenKind::Number) {
      const Token& t = advance();
      auto node = std::make_unique<AstExpr>();
      node->kind = AstExpr::Kind::Number;
      node->span = t.span;
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), value);
      if (ec != std::errc{} || ptr != t.lexeme.data() + t.lexeme.size())
        throw ParseError("malformed number '" + std::string(t.lexeme) + "'", t.span);
      node->number = value;
      return node;
    }

    if (peek().kind == TokenKind::Identifier) {
      const Token& name = advance();
      if (at_punct('(')) {
        advance();
        auto node = std::make_unique<AstExpr>();
        node->kind = AstExpr::Kind::Call;
        node->name = std::string(name.lexeme);
        if (!at_punct(')')) {
          node->args.push_back(parse_expr());
          while (at_punct(',')) {
            advance();
            node->args.push_back(parse_expr());
          }
        }
        if (!at_punct(')')) fail("')' to close the argument list");
        const Token& close = advance();
        node->span = {name.span.begin, close.span.end};
        return node;
      }
      auto node = std::make_unique<AstExpr>();
      node->kind = AstExpr::Kind::Ref;
      node->name = std::string(name.lexeme);
      node->span = name.span;
      return node;
    }

    if (at_punct('(')) {
      advance();
      AstExprPtr inner = parse_expr();
      if (!at_punct(')')) fail("')'");
      advance();
      return inner;
    }

    fail("an expression");
  }

  static AstExprPtr make_binary(char op, AstExprPtr lhs, AstExprPtr rhs) {
    auto node = std::make_unique<AstExpr>();
    node->kind = AstExpr::Kind::Binary;
    node->op = op;
    node->span = {lhs->span.begin, rhs->span.end};
    node->args.push_back(std::move(lhs));
    node->args.push_back(std::move(rhs));
    return node;
  }

  std::span<const Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Ast parse(std::span<const Token> tokens) { return Parser(tokens).run(); }

}  // namespace warp
