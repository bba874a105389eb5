#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "warp/autodiff.hpp"
#include "warp/dsl.hpp"
#include "warp/eval.hpp"

using namespace warp;

namespace {

std::string corpus(const char* name) {
  std::ifstream in(std::string(WARP_CORPUS_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("ids are assigned in insertion order") {
  ExprGraph g;
  NodeId lit = g.add_literal(1.0);
  CHECK(lit == 0);
  NodeId mul = g.add_binary(BinaryOp::Mul, lit, lit);
  CHECK(mul == 1);
  CHECK(g.node(mul).type == ValueType::Scalar);
}

TEST_CASE("type errors at insertion") {
  ExprGraph g;
  NodeId a = g.add_literal(1.0);
  NodeId b = g.add_literal(2.0);
  // cross over two scalars violates its signature
  CHECK_THROWS_AS(g.add_call(Builtin::Cross, std::array{a, b}), GraphError);
  // dangling operand
  CHECK_THROWS_AS(g.add_binary(BinaryOp::Add, a, 99), GraphError);
}

TEST_CASE("validate passes an empty graph and a lowered corpus graph") {
  ExprGraph empty;
  CHECK(validate(empty).empty());

  WarpProgram p = compile_warp(corpus("sine.warp"));
  CHECK(validate(p.graph).empty());
  JacobianExpr jac = jacobian(p.graph, p.offset_root);
  (void)jac;
  CHECK(validate(p.graph).empty());
}

TEST_CASE("validate reports hand-built violations") {
  ExprGraph g;
  g.add_literal(1.0);
  Node bad;
  bad.kind = NodeKind::Binary;
  bad.bop = BinaryOp::Add;
  bad.type = ValueType::Scalar;
  bad.operands = {0, 5};  // 5 is not before this node
  g.push_node_unchecked(bad);
  auto violations = validate(g);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].id == 1);
}

TEST_CASE("topo_order basics") {
  ExprGraph g;
  NodeId lit = g.add_literal(1.0);
  auto order = topo_order(g, std::array{lit});
  CHECK(order == std::vector<NodeId>{0});

  CHECK(topo_order(g, std::span<const NodeId>{}).empty());

  CHECK_THROWS_AS(topo_order(g, std::array{NodeId{42}}), GraphError);
}

TEST_CASE("topo_order on the sine graph puts inputs before sin") {
  WarpProgram p = compile_warp(corpus("sine.warp"));
  auto order = topo_order(p.graph, std::array{p.offset_root});

  // ascending ids, and exactly the reachable set
  for (std::size_t i = 1; i < order.size(); ++i) CHECK(order[i - 1] < order[i]);

  std::optional<std::size_t> millis_at, position_at, sin_at;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node& n = p.graph.node(order[i]);
    if (n.kind == NodeKind::Input && n.input == InputKind::Millis) millis_at = i;
    if (n.kind == NodeKind::Input && n.input == InputKind::Position) position_at = i;
    if (n.kind == NodeKind::Call && n.call == Builtin::Sin) sin_at = i;
  }
  REQUIRE(millis_at.has_value());
  REQUIRE(position_at.has_value());
  REQUIRE(sin_at.has_value());
  CHECK(*millis_at < *sin_at);
  CHECK(*position_at < *sin_at);
}

TEST_CASE("constant zero detection") {
  ExprGraph g;
  NodeId z = g.add_literal(0.0);
  NodeId nz = g.add_literal(0.5);
  NodeId zv = g.add_construct(std::array{z, z, z});
  NodeId mixed = g.add_construct(std::array{z, nz, z});
  CHECK(is_constant_zero(g, z));
  CHECK(is_constant_zero(g, zv));
  CHECK(!is_constant_zero(g, nz));
  CHECK(!is_constant_zero(g, mixed));
}

TEST_CASE("dot dump names kinds and draws operand edges") {
  WarpProgram p = compile_warp(corpus("sine.warp"));
  std::string dot = to_dot(p.graph, std::array{p.offset_root});
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("sin") != std::string::npos);
  CHECK(dot.find("input position") != std::string::npos);
  CHECK(dot.find("->") != std::string::npos);
}

TEST_CASE("dedup merges bit-identical literals and repeated subtrees") {
  WarpProgram p = compile_warp("vec3(sin(position.x) + sin(position.x), 0.0, 0.0)");
  DedupResult d = dedup(p.graph, std::array{p.offset_root});
  CHECK(d.graph.size() < p.graph.size());

  // the duplicated sin collapses to one node
  int sins_before = 0, sins_after = 0;
  for (NodeId id = 0; id < p.graph.size(); ++id)
    if (p.graph.node(id).kind == NodeKind::Call && p.graph.node(id).call == Builtin::Sin)
      ++sins_before;
  for (NodeId id = 0; id < d.graph.size(); ++id)
    if (d.graph.node(id).kind == NodeKind::Call && d.graph.node(id).call == Builtin::Sin)
      ++sins_after;
  CHECK(sins_before == 2);
  CHECK(sins_after == 1);
  CHECK(validate(d.graph).empty());
}

TEST_CASE("dedup never changes evaluation results") {
  for (const char* name : {"sine.warp", "twist.warp", "bulge.warp", "genie.warp"}) {
    WarpProgram p = compile_warp(corpus(name));
    JacobianExpr jac = jacobian(p.graph, p.offset_root);
    std::array<NodeId, 4> roots{p.offset_root, jac.d_dx, jac.d_dy, jac.d_dz};
    DedupResult d = dedup(p.graph, roots);
    CHECK(validate(d.graph).empty());

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coord(-8.0, 8.0);
    std::uniform_real_distribution<double> ms(0.0, 1e5);
    for (int s = 0; s < 50; ++s) {
      Env env;
      env.position = {coord(rng), coord(rng), coord(rng)};
      env.millis = ms(rng);
      env.mouse = {400.0, 300.0};
      for (int r = 0; r < 4; ++r) {
        Value a = eval_graph(p.graph, roots[r], env);
        Value b = eval_graph(d.graph, d.roots[r], env);
        for (int c = 0; c < 3; ++c) CHECK(a.v[c] == b.v[c]);
      }
    }
  }
}

TEST_CASE("dedup keeps distinct literal bit patterns apart") {
  ExprGraph g;
  NodeId a = g.add_literal(0.0);
  NodeId b = g.add_literal(-0.0);
  NodeId c = g.add_literal(0.5);
  NodeId d = g.add_literal(0.5);
  NodeId root = g.add_construct(std::array{a, b, c, d});
  DedupResult r = dedup(g, std::array{root});
  // 0.5 merges with 0.5; -0.0 stays distinct from 0.0
  CHECK(r.graph.size() == 4);  // 0.0, -0.0, 0.5, construct
}

TEST_CASE("input registry survives dedup") {
  WarpProgram p = compile_warp("position - position");
  DedupResult d = dedup(p.graph, std::array{p.offset_root});
  REQUIRE(d.graph.input_node(InputKind::Position).has_value());
  CHECK(validate(d.graph).empty());
}
