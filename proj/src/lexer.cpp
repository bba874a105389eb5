#include <cctype>

#include "warp/dsl.hpp"

namespace warp {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = source.size();

  auto make = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    out.push_back({kind, source.substr(begin, end - begin), {begin, end}});
  };

  while (i < n) {
    char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      while (i < n && source[i] != '\n') ++i;
      continue;
    }

    std::size_t begin = i;

    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(source[i + 1]))) {
      while (i < n && is_digit(source[i])) ++i;
      if (i < n && source[i] == '.') {
        ++i;
        while (i < n && is_digit(source[i])) ++i;
      }
      if (i < n && (source[i] == 'e' || source[i] == 'E')) {
        ++i;
        if (i < n && (source[i] == '+' || source[i] == '-')) ++i;
        if (i >= n || !is_digit(source[i]))
          throw LexError("malformed number: exponent has no digits", {begin, i});
        while (i < n && is_digit(source[i])) ++i;
      }
      make(TokenKind::Number, begin, i);
      continue;
    }

    if (is_ident_start(c)) {
      while (i < n && is_ident_char(source[i])) ++i;
      std::string_view word = source.substr(begin, i - begin);
      make(word == "let" ? TokenKind::KeywordLet : TokenKind::Identifier, begin, i);
      continue;
    }

    switch (c) {
      case '+':
      case '-':
      case '*':
      case '/':
      case '=':
        make(TokenKind::Operator, begin, begin + 1);
        ++i;
        continue;
      case '(':
      case ')':
      case ',':
      case ';':
      case '.':
        make(TokenKind::Punct, begin, begin + 1);
        ++i;
        continue;
      default:
        throw LexError(std::string("unexpected character '") + c + "'", {begin, begin + 1});
    }
  }

  out.push_back({TokenKind::End, source.substr(n, 0), {n, n}});
  return out;
}

}  // namespace warp
