#include <unordered_map>

#include "warp/dsl.hpp"

namespace warp {

namespace {

class Lowerer {
 public:
  explicit Lowerer(ExprGraph& graph) : graph_(graph) {}

  NodeId run(const Ast& ast) {
    for (const LetBinding& let : ast.lets) {
      if (input_by_name(let.name))
        throw TypeError("'" + let.name + "' shadows an input name", let.span);
      if (bindings_.count(let.name))
        throw TypeError("'" + let.name + "' is already bound", let.span);
      bindings_.emplace(let.name, lower_expr(*let.value));
    }
    return lower_expr(*ast.result);
  }

 private:
  NodeId lower_expr(const AstExpr& e) {
    switch (e.kind) {
      case AstExpr::Kind::Number:
        return graph_.add_literal(e.number);

      case AstExpr::Kind::Ref: {
        if (auto it = bindings_.find(e.name); it != bindings_.end()) return it->second;
        if (auto input = input_by_name(e.name)) return graph_.add_input(*input);
        throw TypeError("unknown identifier '" + e.name + "'", e.span);
      }

      case AstExpr::Kind::Unary:
        return graph_.add_unary(UnaryOp::Neg, lower_expr(*e.args[0]));

      case AstExpr::Kind::Binary: {
        NodeId lhs = lower_expr(*e.args[0]);
        NodeId rhs = lower_expr(*e.args[1]);
        auto [l, r] = broadcast_pair(lhs, rhs, e.span);
        BinaryOp op;
        switch (e.op) {
          case '+': op = BinaryOp::Add; break;
          case '-': op = BinaryOp::Sub; break;
          case '*': op = BinaryOp::Mul; break;
          default: op = BinaryOp::Div; break;
        }
        return graph_.add_binary(op, l, r);
      }

      case AstExpr::Kind::Call:
        return lower_call(e);

      case AstExpr::Kind::Swizzle:
        return lower_swizzle(e);
    }
    throw TypeError("unhandled expression", e.span);
  }

  NodeId lower_call(const AstExpr& e) {
    // vecN constructors: N scalars, or one scalar splatted.
    for (int n = 2; n <= 4; ++n) {
      if (e.name == "vec" + std::to_string(n)) {
        std::vector<NodeId> args;
        for (const auto& a : e.args) args.push_back(lower_expr(*a));
        for (std::size_t i = 0; i < args.size(); ++i)
          if (graph_.node(args[i]).type != ValueType::Scalar)
            throw TypeError(e.name + " arguments must be scalar", e.args[i]->span);
        if (args.size() == 1) args.assign(static_cast<std::size_t>(n), args[0]);
        if (args.size() != static_cast<std::size_t>(n))
          throw TypeError(e.name + " expects " + std::to_string(n) + " scalar arguments (or 1 to splat), got " +
                              std::to_string(e.args.size()),
                          e.span);
        return graph_.add_construct(args);
      }
    }

    auto builtin = dsl_builtin_by_name(e.name);
    if (!builtin) throw TypeError("unknown identifier '" + e.name + "'", e.span);

    if (e.args.size() != static_cast<std::size_t>(builtin_arity(*builtin)))
      throw TypeError(e.name + " expects " + std::to_string(builtin_arity(*builtin)) +
                          " arguments, got " + std::to_string(e.args.size()),
                      e.span);

    std::vector<NodeId> args;
    for (const auto& a : e.args) args.push_back(lower_expr(*a));

    switch (*builtin) {
      case Builtin::Dot:
      case Builtin::Cross:
      case Builtin::Length:
      case Builtin::Normalize:
        break;  // strict vector signatures, checked by the graph
      default:
        broadcast_all(args, e.span);
        break;
    }

    try {
      return graph_.add_call(*builtin, args);
    } catch (const GraphError& err) {
      throw TypeError(err.what(), e.span);
    }
  }

  NodeId lower_swizzle(const AstExpr& e) {
    NodeId operand = lower_expr(*e.args[0]);
    ValueType src = graph_.node(operand).type;
    if (src == ValueType::Scalar)
      throw TypeError("cannot swizzle a scalar value", e.span);
    if (e.swizzle.empty() || e.swizzle.size() > 4)
      throw TypeError("swizzle must select 1 to 4 components", e.span);
    std::vector<std::uint8_t> comps;
    for (char c : e.swizzle) {
      int idx;
      switch (c) {
        case 'x': idx = 0; break;
        case 'y': idx = 1; break;
        case 'z': idx = 2; break;
        case 'w': idx = 3; break;
        default:
          throw TypeError(std::string("invalid swizzle component '") + c + "'", e.span);
      }
      if (idx >= component_count(src))
        throw TypeError(std::string("component '") + c + "' is out of range for " +
                            std::string(type_name(src)),
                        e.span);
      comps.push_back(static_cast<std::uint8_t>(idx));
    }
    return graph_.add_swizzle(operand, comps);
  }

  /// Splats `scalar_id` into a vector of `target` components. The same node
  /// id is repeated, so the scalar is still evaluated once.
  NodeId splat(NodeId scalar_id, ValueType target) {
    std::vector<NodeId> ops(static_cast<std::size_t>(component_count(target)), scalar_id);
    return graph_.add_construct(ops);
  }

  std::pair<NodeId, NodeId> broadcast_pair(NodeId a, NodeId b, Span span) {
    ValueType ta = graph_.node(a).type;
    ValueType tb = graph_.node(b).type;
    if (ta == tb) return {a, b};
    if (ta == ValueType::Scalar) return {splat(a, tb), b};
    if (tb == ValueType::Scalar) return {a, splat(b, ta)};
    throw TypeError("operand types " + std::string(type_name(ta)) + " and " +
                        std::string(type_name(tb)) + " do not match",
                    span);
  }

  void broadcast_all(std::vector<NodeId>& args, Span span) {
    ValueType target = ValueType::Scalar;
    for (NodeId a : args) {
      ValueType t = graph_.node(a).type;
      if (t == ValueType::Scalar) continue;
      if (target != ValueType::Scalar && target != t)
        throw TypeError("mixed vector sizes " + std::string(type_name(target)) + " and " +
                            std::string(type_name(t)),
                        span);
      target = t;
    }
    if (target == ValueType::Scalar) return;
    for (NodeId& a : args)
      if (graph_.node(a).type == ValueType::Scalar) a = splat(a, target);
  }

  ExprGraph& graph_;
  std::unordered_map<std::string, NodeId> bindings_;
};

}  // namespace

WarpProgram lower(std::string source, Ast ast) {
  WarpProgram program;
  program.source = std::move(source);

  Lowerer lowerer(program.graph);
  program.offset_root = lowerer.run(ast);
  program.ast = std::move(ast);

  if (program.graph.node(program.offset_root).type != ValueType::Vec3)
    throw TypeError(
        "the offset must be vec3, got " +
            std::string(type_name(program.graph.node(program.offset_root).type)),
        program.ast.result->span);

  for (int i = 0; i < kInputCount; ++i)
    if (program.graph.inputs()[i]) program.referenced_inputs.push_back(static_cast<InputKind>(i));
  program.value_node_count = program.graph.size();
  return program;
}

WarpProgram compile_warp(std::string source) {
  auto tokens = tokenize(source);
  Ast ast = parse(tokens);
  return lower(std::move(source), std::move(ast));
}

}  // namespace warp
