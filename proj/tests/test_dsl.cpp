#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "warp/dsl.hpp"
#include "warp/eval.hpp"

using namespace warp;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<TokenKind> kinds_of(const std::string& source) {
  std::vector<TokenKind> out;
  for (const Token& t : tokenize(source)) out.push_back(t.kind);
  return out;
}

}  // namespace

TEST_CASE("tokenize single literal") {
  auto tokens = tokenize("0.5");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].kind == TokenKind::Number);
  CHECK(tokens[0].lexeme == "0.5");
  CHECK(tokens[1].kind == TokenKind::End);
}

TEST_CASE("tokenize swizzled product") {
  auto tokens = tokenize("position.y * 2.0");
  std::vector<TokenKind> expected{TokenKind::Identifier, TokenKind::Punct, TokenKind::Identifier,
                                  TokenKind::Operator, TokenKind::Number, TokenKind::End};
  CHECK(kinds_of("position.y * 2.0") == expected);
  CHECK(tokens[1].lexeme == ".");
  CHECK(tokens[2].lexeme == "y");
}

TEST_CASE("tokenize let statement") {
  std::vector<TokenKind> expected{TokenKind::KeywordLet, TokenKind::Identifier,
                                  TokenKind::Operator, TokenKind::Identifier, TokenKind::Punct,
                                  TokenKind::Identifier, TokenKind::Punct, TokenKind::Punct,
                                  TokenKind::End};
  CHECK(kinds_of("let a = sin(millis);") == expected);
}

TEST_CASE("token spans are ordered and lexemes round-trip") {
  std::string source = read_file(std::string(WARP_CORPUS_DIR) + "/twist.warp");
  auto tokens = tokenize(source);
  std::size_t prev_end = 0;
  for (const Token& t : tokens) {
    CHECK(t.span.begin >= prev_end);
    CHECK(t.span.end >= t.span.begin);
    CHECK(source.substr(t.span.begin, t.span.end - t.span.begin) == t.lexeme);
    prev_end = t.span.end;
  }
  CHECK(tokens.back().kind == TokenKind::End);
}

TEST_CASE("comments are skipped") {
  auto tokens = tokenize("// all gone\n1.0 // trailing\n");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].lexeme == "1.0");
}

TEST_CASE("lexical errors carry byte offsets") {
  CHECK_THROWS_AS(tokenize("1.0 @ 2.0"), LexError);
  try {
    tokenize("1.0 @ 2.0");
  } catch (const LexError& e) {
    CHECK(e.span().begin == 4);
  }
  CHECK_THROWS_AS(tokenize("2.0e+"), LexError);
}

TEST_CASE("parse precedence") {
  auto tokens = tokenize("1.0 + 2.0 * 3.0");
  Ast ast = parse(tokens);
  REQUIRE(ast.result->kind == AstExpr::Kind::Binary);
  CHECK(ast.result->op == '+');
  const AstExpr& rhs = *ast.result->args[1];
  REQUIRE(rhs.kind == AstExpr::Kind::Binary);
  CHECK(rhs.op == '*');
}

TEST_CASE("swizzle binds tighter than unary minus") {
  auto tokens = tokenize("-position.x");
  Ast ast = parse(tokens);
  REQUIRE(ast.result->kind == AstExpr::Kind::Unary);
  const AstExpr& inner = *ast.result->args[0];
  CHECK(inner.kind == AstExpr::Kind::Swizzle);
  CHECK(inner.swizzle == "x");
}

TEST_CASE("parentheses override precedence") {
  auto tokens = tokenize("(1.0 + 2.0) * 3.0");
  Ast ast = parse(tokens);
  REQUIRE(ast.result->kind == AstExpr::Kind::Binary);
  CHECK(ast.result->op == '*');
}

TEST_CASE("left associativity of subtraction") {
  auto tokens = tokenize("1.0 - 2.0 - 3.0");
  Ast ast = parse(tokens);
  // (1 - 2) - 3
  REQUIRE(ast.result->op == '-');
  CHECK(ast.result->args[0]->kind == AstExpr::Kind::Binary);
  CHECK(ast.result->args[1]->kind == AstExpr::Kind::Number);
}

TEST_CASE("call arguments") {
  auto tokens = tokenize("vec3(0.5 * sin(millis * 0.005 + 2.0 * position.y), 0.0, 0.0)");
  Ast ast = parse(tokens);
  REQUIRE(ast.result->kind == AstExpr::Kind::Call);
  CHECK(ast.result->name == "vec3");
  REQUIRE(ast.result->args.size() == 3);
  const AstExpr& first = *ast.result->args[0];
  REQUIRE(first.kind == AstExpr::Kind::Binary);
  CHECK(first.op == '*');
  CHECK(first.args[1]->kind == AstExpr::Kind::Call);
  CHECK(first.args[1]->name == "sin");
}

TEST_CASE("syntax errors name the expected token") {
  auto tokens = tokenize("1.0 +");
  try {
    parse(tokens);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("expected") != std::string::npos);
    CHECK(e.span().begin == 5);
  }

  CHECK_THROWS_AS(parse(tokenize("let a = 1.0")), ParseError);  // missing ';'
  CHECK_THROWS_AS(parse(tokenize("vec3(1.0, 2.0")), ParseError);
  CHECK_THROWS_AS(parse(tokenize("1.0 2.0")), ParseError);  // trailing junk
}

TEST_CASE("lower zero warp builds one constructor over three literals") {
  WarpProgram p = compile_warp("vec3(0.0, 0.0, 0.0)");
  const Node& root = p.graph.node(p.offset_root);
  CHECK(root.kind == NodeKind::Construct);
  REQUIRE(root.operands.size() == 3);
  int literal_zeros = 0;
  for (NodeId op : root.operands)
    if (p.graph.node(op).kind == NodeKind::Literal && p.graph.node(op).literal == 0.0)
      ++literal_zeros;
  CHECK(literal_zeros == 3);
  CHECK(p.graph.size() == 4);
}

TEST_CASE("inputs are shared nodes") {
  WarpProgram p = compile_warp("position - position");
  const Node& root = p.graph.node(p.offset_root);
  REQUIRE(root.kind == NodeKind::Binary);
  CHECK(root.operands[0] == root.operands[1]);
  CHECK(p.referenced_inputs == std::vector<InputKind>{InputKind::Position});
}

TEST_CASE("let bindings become shared subgraphs") {
  WarpProgram p = compile_warp("let a = sin(position.x);\nvec3(a, a, a)");
  const Node& root = p.graph.node(p.offset_root);
  REQUIRE(root.kind == NodeKind::Construct);
  CHECK(root.operands[0] == root.operands[1]);
  CHECK(root.operands[1] == root.operands[2]);
}

TEST_CASE("lowering is deterministic") {
  std::string source = read_file(std::string(WARP_CORPUS_DIR) + "/twist.warp");
  WarpProgram a = compile_warp(source);
  WarpProgram b = compile_warp(source);
  REQUIRE(a.graph.size() == b.graph.size());
  CHECK(a.offset_root == b.offset_root);
  for (NodeId id = 0; id < a.graph.size(); ++id) {
    const Node& na = a.graph.node(id);
    const Node& nb = b.graph.node(id);
    CHECK(na.kind == nb.kind);
    CHECK(na.type == nb.type);
    CHECK(na.operands == nb.operands);
    CHECK(na.literal == nb.literal);
  }
}

TEST_CASE("broadcasting splats the scalar and matches a manual splat") {
  WarpProgram splatted = compile_warp("position * 2.0");
  WarpProgram manual = compile_warp("position * vec3(2.0, 2.0, 2.0)");

  const Node& root = splatted.graph.node(splatted.offset_root);
  REQUIRE(root.kind == NodeKind::Binary);
  const Node& rhs = splatted.graph.node(root.operands[1]);
  REQUIRE(rhs.kind == NodeKind::Construct);
  CHECK(rhs.operands[0] == rhs.operands[1]);  // one scalar node, repeated

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int i = 0; i < 32; ++i) {
    Env env;
    env.position = {coord(rng), coord(rng), coord(rng)};
    Vec3 a = eval_graph(splatted.graph, splatted.offset_root, env).vec3();
    Vec3 b = eval_graph(manual.graph, manual.offset_root, env).vec3();
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.z == b.z);
  }
}

TEST_CASE("builtin broadcasting in mixed calls") {
  WarpProgram p = compile_warp("min(position, 0.25)");
  Env env;
  env.position = {1.0, -3.0, 0.1};
  Vec3 v = eval_graph(p.graph, p.offset_root, env).vec3();
  CHECK(v.x == 0.25);
  CHECK(v.y == -3.0);
  CHECK(v.z == 0.1);
}

TEST_CASE("vector constructor splat") {
  WarpProgram p = compile_warp("vec3(0.5) + position - position");
  Env env;
  env.position = {1.0, 2.0, 3.0};
  Vec3 v = eval_graph(p.graph, p.offset_root, env).vec3();
  CHECK(v.x == 0.5);
  CHECK(v.y == 0.5);
  CHECK(v.z == 0.5);
}

TEST_CASE("type errors") {
  // mixed vector sizes
  CHECK_THROWS_AS(compile_warp("position + mouse"), TypeError);
  // swizzle out of range
  CHECK_THROWS_AS(compile_warp("vec3(mouse.z, 0.0, 0.0)"), TypeError);
  // swizzle on a scalar
  CHECK_THROWS_AS(compile_warp("vec3(millis.x, 0.0, 0.0)"), TypeError);
  // wrong arity
  CHECK_THROWS_AS(compile_warp("vec3(sin(1.0, 2.0), 0.0, 0.0)"), TypeError);
  // wrong constructor arity
  CHECK_THROWS_AS(compile_warp("vec3(1.0, 2.0)"), TypeError);
  // dot needs vectors
  CHECK_THROWS_AS(compile_warp("vec3(dot(1.0, 2.0), 0.0, 0.0)"), TypeError);
  // cross needs vec3
  CHECK_THROWS_AS(compile_warp("cross(mouse, mouse)"), TypeError);
  // offset must be vec3
  CHECK_THROWS_AS(compile_warp("1.0"), TypeError);
  CHECK_THROWS_AS(compile_warp("mouse"), TypeError);
}

TEST_CASE("binding rules") {
  // unknown identifier
  CHECK_THROWS_AS(compile_warp("vec3(wobble, 0.0, 0.0)"), TypeError);
  // unknown call
  CHECK_THROWS_AS(compile_warp("vec3(sinh(1.0), 0.0, 0.0)"), TypeError);
  // forward reference
  CHECK_THROWS_AS(compile_warp("let a = b; let b = 1.0; vec3(a, b, 0.0)"), TypeError);
  // shadowing an input
  CHECK_THROWS_AS(compile_warp("let position = 1.0; vec3(position, 0.0, 0.0)"), TypeError);
  // duplicate binding
  CHECK_THROWS_AS(compile_warp("let a = 1.0; let a = 2.0; vec3(a, 0.0, 0.0)"), TypeError);
}

TEST_CASE("internal builtins are not part of the surface language") {
  CHECK_THROWS_AS(compile_warp("vec3(sign(position.x), 0.0, 0.0)"), TypeError);
  CHECK_THROWS_AS(compile_warp("vec3(step(0.0, position.x), 0.0, 0.0)"), TypeError);
}

TEST_CASE("multi-component swizzles") {
  WarpProgram p = compile_warp("vec3(position.zy.x, position.xxy.z, 0.0)");
  Env env;
  env.position = {1.0, 2.0, 3.0};
  Vec3 v = eval_graph(p.graph, p.offset_root, env).vec3();
  CHECK(v.x == 3.0);  // .zy.x selects z
  CHECK(v.y == 2.0);  // .xxy.z selects y
}

TEST_CASE("every corpus warp compiles and references only declared inputs") {
  for (const char* name : {"sine.warp", "twist.warp", "flatten.warp", "bulge.warp", "genie.warp"}) {
    std::string source = read_file(std::string(WARP_CORPUS_DIR) + "/" + name);
    WarpProgram p = compile_warp(source);
    CHECK(p.graph.node(p.offset_root).type == ValueType::Vec3);
    CHECK(validate(p.graph).empty());
    for (NodeId id = 0; id < p.graph.size(); ++id) {
      const Node& n = p.graph.node(id);
      if (n.operands.empty())
        CHECK((n.kind == NodeKind::Literal || n.kind == NodeKind::Input));
      if (n.kind == NodeKind::Input) CHECK(p.graph.input_node(n.input) == id);
    }
  }
}
