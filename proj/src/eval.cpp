#include "warp/eval.hpp"

#include <cmath>
#include <optional>

#include "warp/scalar_ops.hpp"

namespace warp {

namespace {

Value make_value(ValueType t) {
  Value v;
  v.type = t;
  return v;
}

void require_finite(const Value& v, const std::string& where) {
  for (int i = 0; i < component_count(v.type); ++i)
    if (!std::isfinite(v.v[i])) throw EvalError("non-finite result", where);
}

Value componentwise1(ValueType t, const Value& a, double (*f)(double)) {
  Value out = make_value(t);
  for (int i = 0; i < component_count(t); ++i) out.v[i] = f(a.v[i]);
  return out;
}

Value input_value(InputKind k, const Env& env, const std::string& where) {
  switch (k) {
    case InputKind::Position:
      return Value::vec3_of(env.position);
    case InputKind::Normal: {
      double len = length(env.normal);
      if (std::fabs(len - 1.0) > 1e-6)
        throw EvalError("normal input is not unit length", where);
      return Value::vec3_of(env.normal);
    }
    case InputKind::Millis:
      return Value::scalar_of(env.millis);
    case InputKind::Mouse:
      return {ValueType::Vec2, {env.mouse.x, env.mouse.y, 0, 0}};
    case InputKind::Resolution:
      return {ValueType::Vec2, {env.resolution.x, env.resolution.y, 0, 0}};
  }
  throw EvalError("unknown input", where);
}

Value apply_binary(BinaryOp op, const Value& a, const Value& b, const std::string& where) {
  Value out = make_value(a.type);
  int n = component_count(a.type);
  switch (op) {
    case BinaryOp::Add:
      for (int i = 0; i < n; ++i) out.v[i] = ops::add(a.v[i], b.v[i]);
      break;
    case BinaryOp::Sub:
      for (int i = 0; i < n; ++i) out.v[i] = ops::sub(a.v[i], b.v[i]);
      break;
    case BinaryOp::Mul:
      for (int i = 0; i < n; ++i) out.v[i] = ops::mul(a.v[i], b.v[i]);
      break;
    case BinaryOp::Div:
      for (int i = 0; i < n; ++i) {
        if (b.v[i] == 0.0) throw EvalError("division by zero", where);
        out.v[i] = ops::div(a.v[i], b.v[i]);
      }
      break;
  }
  return out;
}

Value apply_call(Builtin call, ValueType t, const Value* args, const std::string& where) {
  const int n = component_count(t);
  Value out = make_value(t);
  const Value& a = args[0];

  switch (call) {
    case Builtin::Sin: return componentwise1(t, a, [](double x) { return std::sin(x); });
    case Builtin::Cos: return componentwise1(t, a, [](double x) { return std::cos(x); });
    case Builtin::Tan: return componentwise1(t, a, [](double x) { return std::tan(x); });
    case Builtin::Asin:
      for (int i = 0; i < n; ++i) {
        if (a.v[i] < -1.0 || a.v[i] > 1.0) throw EvalError("asin outside [-1, 1]", where);
        out.v[i] = std::asin(a.v[i]);
      }
      return out;
    case Builtin::Acos:
      for (int i = 0; i < n; ++i) {
        if (a.v[i] < -1.0 || a.v[i] > 1.0) throw EvalError("acos outside [-1, 1]", where);
        out.v[i] = std::acos(a.v[i]);
      }
      return out;
    case Builtin::Atan: return componentwise1(t, a, [](double x) { return std::atan(x); });
    case Builtin::Exp: return componentwise1(t, a, [](double x) { return std::exp(x); });
    case Builtin::Log:
      for (int i = 0; i < n; ++i) {
        if (a.v[i] <= 0.0) throw EvalError("log of a non-positive value", where);
        out.v[i] = std::log(a.v[i]);
      }
      return out;
    case Builtin::Sqrt:
      for (int i = 0; i < n; ++i) {
        if (a.v[i] < 0.0) throw EvalError("sqrt of a negative value", where);
        out.v[i] = std::sqrt(a.v[i]);
      }
      return out;
    case Builtin::Abs: return componentwise1(t, a, ops::abs_);
    case Builtin::Floor: return componentwise1(t, a, ops::floor_);
    case Builtin::Fract: return componentwise1(t, a, ops::fract);
    case Builtin::Sign: return componentwise1(t, a, ops::sign);

    case Builtin::Pow:
      for (int i = 0; i < n; ++i) {
        double base = a.v[i], expo = args[1].v[i];
        if (base < 0.0) throw EvalError("pow with a negative base", where);
        if (base == 0.0 && expo <= 0.0) throw EvalError("pow(0, y) with y <= 0", where);
        out.v[i] = std::pow(base, expo);
      }
      return out;
    case Builtin::Mod:
      for (int i = 0; i < n; ++i) {
        if (args[1].v[i] == 0.0) throw EvalError("mod by zero", where);
        out.v[i] = ops::mod(a.v[i], args[1].v[i]);
      }
      return out;
    case Builtin::Min:
      for (int i = 0; i < n; ++i) out.v[i] = ops::min_(a.v[i], args[1].v[i]);
      return out;
    case Builtin::Max:
      for (int i = 0; i < n; ++i) out.v[i] = ops::max_(a.v[i], args[1].v[i]);
      return out;
    case Builtin::Step:
      for (int i = 0; i < n; ++i) out.v[i] = ops::step(a.v[i], args[1].v[i]);
      return out;
    case Builtin::Clamp:
      for (int i = 0; i < n; ++i) out.v[i] = ops::clamp(a.v[i], args[1].v[i], args[2].v[i]);
      return out;
    case Builtin::Mix:
      for (int i = 0; i < n; ++i) out.v[i] = ops::mix(a.v[i], args[1].v[i], args[2].v[i]);
      return out;

    case Builtin::Dot: {
      const Value& b = args[1];
      int m = component_count(a.type);
      double d = 0.0;
      if (m == 2) d = ops::dot2(a.v[0], a.v[1], b.v[0], b.v[1]);
      else if (m == 3) d = ops::dot3(a.v[0], a.v[1], a.v[2], b.v[0], b.v[1], b.v[2]);
      else d = ops::dot4(a.v[0], a.v[1], a.v[2], a.v[3], b.v[0], b.v[1], b.v[2], b.v[3]);
      return Value::scalar_of(d);
    }
    case Builtin::Cross: {
      const Value& b = args[1];
      Value c = make_value(ValueType::Vec3);
      c.v[0] = ops::cross_x(a.v[1], a.v[2], b.v[1], b.v[2]);
      c.v[1] = ops::cross_y(a.v[0], a.v[2], b.v[0], b.v[2]);
      c.v[2] = ops::cross_z(a.v[0], a.v[1], b.v[0], b.v[1]);
      return c;
    }
    case Builtin::Length: {
      int m = component_count(a.type);
      double d = m == 2 ? ops::dot2(a.v[0], a.v[1], a.v[0], a.v[1])
                : m == 3 ? ops::dot3(a.v[0], a.v[1], a.v[2], a.v[0], a.v[1], a.v[2])
                         : ops::dot4(a.v[0], a.v[1], a.v[2], a.v[3], a.v[0], a.v[1], a.v[2], a.v[3]);
      return Value::scalar_of(std::sqrt(d));
    }
    case Builtin::Normalize: {
      int m = component_count(a.type);
      double d = m == 2 ? ops::dot2(a.v[0], a.v[1], a.v[0], a.v[1])
                : m == 3 ? ops::dot3(a.v[0], a.v[1], a.v[2], a.v[0], a.v[1], a.v[2])
                         : ops::dot4(a.v[0], a.v[1], a.v[2], a.v[3], a.v[0], a.v[1], a.v[2], a.v[3]);
      double len = std::sqrt(d);
      if (len == 0.0) throw EvalError("normalize of a zero vector", where);
      Value c = make_value(a.type);
      for (int i = 0; i < m; ++i) c.v[i] = ops::div(a.v[i], len);
      return c;
    }
  }
  throw EvalError("unhandled builtin", where);
}

void check_env(const Env& env) {
  bool ok = is_finite(env.position) && is_finite(env.normal) && std::isfinite(env.millis) &&
            std::isfinite(env.mouse.x) && std::isfinite(env.mouse.y) &&
            std::isfinite(env.resolution.x) && std::isfinite(env.resolution.y);
  if (!ok) throw EvalError("environment contains non-finite values", "env");
}

Value eval_node(const ExprGraph& graph, NodeId id, const std::vector<Value>& memo,
                const Env& env) {
  const Node& node = graph.node(id);
  std::string where = "node " + std::to_string(id);

  switch (node.kind) {
    case NodeKind::Literal:
      return Value::scalar_of(node.literal);
    case NodeKind::Input:
      return input_value(node.input, env, where);
    case NodeKind::Unary: {
      const Value& a = memo[node.operands[0]];
      return componentwise1(node.type, a, ops::neg);
    }
    case NodeKind::Binary: {
      Value out = apply_binary(node.bop, memo[node.operands[0]], memo[node.operands[1]], where);
      require_finite(out, where);
      return out;
    }
    case NodeKind::Swizzle: {
      const Value& a = memo[node.operands[0]];
      Value out = make_value(node.type);
      for (int i = 0; i < node.swizzle_size; ++i) out.v[i] = a.v[node.swizzle[i]];
      return out;
    }
    case NodeKind::Construct: {
      Value out = make_value(node.type);
      for (std::size_t i = 0; i < node.operands.size(); ++i) out.v[i] = memo[node.operands[i]].v[0];
      return out;
    }
    case NodeKind::Call: {
      std::array<Value, 3> args{};
      for (std::size_t i = 0; i < node.operands.size(); ++i) args[i] = memo[node.operands[i]];
      Value out = apply_call(node.call, node.type, args.data(), where);
      require_finite(out, where);
      return out;
    }
  }
  throw EvalError("unhandled node kind", where);
}

}  // namespace

std::vector<Value> eval_reachable(const ExprGraph& graph, std::span<const NodeId> roots,
                                  const Env& env) {
  check_env(env);
  auto reach = reachable_set(graph, roots);
  std::vector<Value> memo(graph.size());
  for (NodeId id = 0; id < graph.size(); ++id)
    if (reach[id]) memo[id] = eval_node(graph, id, memo, env);
  return memo;
}

std::vector<Value> eval_graph_many(const ExprGraph& graph, std::span<const NodeId> roots,
                                   const Env& env) {
  auto memo = eval_reachable(graph, roots, env);
  std::vector<Value> out;
  out.reserve(roots.size());
  for (NodeId r : roots) out.push_back(memo[r]);
  return out;
}

Value eval_graph(const ExprGraph& graph, NodeId root, const Env& env) {
  return eval_graph_many(graph, std::span<const NodeId>(&root, 1), env)[0];
}

namespace {

Value eval_lin_expr(const LinExpr& e, const std::vector<Value>& stmt_values, const Env& env,
                    const std::string& where) {
  switch (e.kind) {
    case LinExpr::Kind::Ref:
      return stmt_values[e.ref];
    case LinExpr::Kind::Literal:
      return Value::scalar_of(e.literal);
    case LinExpr::Kind::Input:
      return input_value(e.input, env, where);
    case LinExpr::Kind::ZeroVec:
      return make_value(e.type);
    case LinExpr::Kind::Swizzle: {
      Value a = eval_lin_expr(e.args[0], stmt_values, env, where);
      Value out = make_value(e.type);
      for (int i = 0; i < e.swizzle_size; ++i) out.v[i] = a.v[e.swizzle[i]];
      return out;
    }
    case LinExpr::Kind::Unary: {
      Value a = eval_lin_expr(e.args[0], stmt_values, env, where);
      return componentwise1(e.type, a, ops::neg);
    }
    case LinExpr::Kind::Binary: {
      Value a = eval_lin_expr(e.args[0], stmt_values, env, where);
      Value b = eval_lin_expr(e.args[1], stmt_values, env, where);
      Value out = apply_binary(e.bop, a, b, where);
      require_finite(out, where);
      return out;
    }
    case LinExpr::Kind::Call: {
      std::array<Value, 3> args{};
      for (std::size_t i = 0; i < e.args.size(); ++i)
        args[i] = eval_lin_expr(e.args[i], stmt_values, env, where);
      Value out = apply_call(e.call, e.type, args.data(), where);
      require_finite(out, where);
      return out;
    }
    case LinExpr::Kind::Construct: {
      Value out = make_value(e.type);
      for (std::size_t i = 0; i < e.args.size(); ++i)
        out.v[i] = eval_lin_expr(e.args[i], stmt_values, env, where).v[0];
      return out;
    }
  }
  throw EvalError("unhandled expression kind", where);
}

}  // namespace

LinearOutputs eval_linear(const LinearProgram& program, const Env& env) {
  check_env(env);
  std::vector<Value> values;
  values.reserve(program.statements.size());
  for (const LinStatement& stmt : program.statements) {
    std::string where = "statement '" + stmt.name + "'";
    values.push_back(eval_lin_expr(stmt.expr, values, env, where));
  }
  LinearOutputs out;
  out.offset = values[program.outputs[0]].vec3();
  out.dodx = values[program.outputs[1]].vec3();
  out.dody = values[program.outputs[2]].vec3();
  out.dodz = values[program.outputs[3]].vec3();
  return out;
}

Mat3 finite_diff_jacobian(const ExprGraph& graph, NodeId offset_root, const Env& env, double h) {
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  Mat3 j;
  for (int axis = 0; axis < 3; ++axis) {
    Env plus = env, minus = env;
    double* pp = axis == 0 ? &plus.position.x : axis == 1 ? &plus.position.y : &plus.position.z;
    double* pm = axis == 0 ? &minus.position.x : axis == 1 ? &minus.position.y : &minus.position.z;
    *pp += h;
    *pm -= h;
    Vec3 fp = eval_graph(graph, offset_root, plus).vec3();
    Vec3 fm = eval_graph(graph, offset_root, minus).vec3();
    j.col[axis] = (fp - fm) / (2.0 * h);
  }
  return j;
}

Mat3 ad_jacobian(const ExprGraph& graph, const JacobianExpr& jac, const Env& env) {
  std::array<NodeId, 3> roots{jac.d_dx, jac.d_dy, jac.d_dz};
  auto values = eval_graph_many(graph, roots, env);
  return {{values[0].vec3(), values[1].vec3(), values[2].vec3()}};
}

double collapse_diagnostic(const Mat3& j) {
  Mat3 m = j;
  m.col[0].x += 1.0;
  m.col[1].y += 1.0;
  m.col[2].z += 1.0;
  return determinant(m);
}

}  // namespace warp
