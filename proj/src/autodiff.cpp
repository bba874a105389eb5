#include "warp/autodiff.hpp"

#include <optional>

namespace warp {

std::string_view wrt_name(Wrt w) {
  switch (w) {
    case Wrt::X: return "x";
    case Wrt::Y: return "y";
    case Wrt::Z: return "z";
  }
  return "?";
}

namespace {

// Builds derivative nodes for one independent variable. Zero derivatives are
// tracked so that product-rule terms with a zero factor are dropped (the sum
// rule keeps literal zeros, matching one-statement-per-node output), and so
// whole columns can later be detected as constant zero.
class Differentiator {
 public:
  Differentiator(ExprGraph& graph, Wrt wrt) : g_(graph), wrt_(wrt) {}

  DiffResult run(NodeId root) {
    auto order = topo_order(g_, std::span<const NodeId>(&root, 1));
    DiffResult result;
    for (NodeId id : order) {
      NodeId d = derive(id);
      memo_[id] = d;
      result.derivative_by_value.emplace(id, d);
    }
    result.root = memo_.at(root);
    return result;
  }

 private:
  NodeId zero_scalar() {
    if (!zero_scalar_) zero_scalar_ = g_.add_literal(0.0);
    return *zero_scalar_;
  }

  NodeId zero_of(ValueType t) {
    if (t == ValueType::Scalar) return zero_scalar();
    int n = component_count(t);
    auto& slot = zero_vec_[n - 2];
    if (!slot) {
      std::vector<NodeId> ops(static_cast<std::size_t>(n), zero_scalar());
      slot = g_.add_construct(ops);
    }
    return *slot;
  }

  bool zero(NodeId id) const { return is_constant_zero(g_, id); }

  NodeId one_of(ValueType t) { return const_of(t, 1.0); }

  NodeId const_of(ValueType t, double value) {
    NodeId lit = g_.add_literal(value);
    if (t == ValueType::Scalar) return lit;
    std::vector<NodeId> ops(static_cast<std::size_t>(component_count(t)), lit);
    return g_.add_construct(ops);
  }

  /// d(position)/d(wrt): the basis vector for wrt.
  NodeId seed() {
    if (seed_) return *seed_;
    std::array<NodeId, 3> comps{};
    for (int i = 0; i < 3; ++i)
      comps[i] = (i == static_cast<int>(wrt_)) ? g_.add_literal(1.0) : g_.add_literal(0.0);
    seed_ = g_.add_construct(comps);
    return *seed_;
  }

  NodeId mul(NodeId a, NodeId b) { return g_.add_binary(BinaryOp::Mul, a, b); }
  NodeId add(NodeId a, NodeId b) { return g_.add_binary(BinaryOp::Add, a, b); }
  NodeId sub(NodeId a, NodeId b) { return g_.add_binary(BinaryOp::Sub, a, b); }
  NodeId div(NodeId a, NodeId b) { return g_.add_binary(BinaryOp::Div, a, b); }
  NodeId neg(NodeId a) { return g_.add_unary(UnaryOp::Neg, a); }
  NodeId call1(Builtin b, NodeId a) { return g_.add_call(b, std::array{a}); }
  NodeId call2(Builtin b, NodeId x, NodeId y) { return g_.add_call(b, std::array{x, y}); }
  NodeId call3(Builtin b, NodeId x, NodeId y, NodeId z) {
    return g_.add_call(b, std::array{x, y, z});
  }

  /// Scalar widened to the vector type of a context node when needed.
  NodeId widen(NodeId scalar_id, ValueType target) {
    if (target == ValueType::Scalar) return scalar_id;
    std::vector<NodeId> ops(static_cast<std::size_t>(component_count(target)), scalar_id);
    return g_.add_construct(ops);
  }

  /// Single-surviving-term product rule, coefficient first: c * u'.
  NodeId scaled(NodeId coefficient, NodeId derivative) { return mul(coefficient, derivative); }

  NodeId derive(NodeId id) {
    current_id_ = id;
    const Node n = g_.node(id);
    switch (n.kind) {
      case NodeKind::Literal:
        return zero_scalar();

      case NodeKind::Input:
        return n.input == InputKind::Position ? seed() : zero_of(n.type);

      case NodeKind::Unary: {
        NodeId du = memo_.at(n.operands[0]);
        return zero(du) ? zero_of(n.type) : neg(du);
      }

      case NodeKind::Binary:
        return derive_binary(n);

      case NodeKind::Swizzle:
        return derive_swizzle(n);

      case NodeKind::Construct: {
        bool all_zero = true;
        for (NodeId op : n.operands)
          if (!zero(memo_.at(op))) all_zero = false;
        if (all_zero) return zero_of(n.type);
        std::vector<NodeId> dops;
        for (NodeId op : n.operands) dops.push_back(memo_.at(op));
        return g_.add_construct(dops);
      }

      case NodeKind::Call:
        return derive_call(n);
    }
    throw GraphError("no derivative rule for node " + std::to_string(id));
  }

  NodeId derive_binary(const Node& n) {
    NodeId a = n.operands[0], b = n.operands[1];
    NodeId da = memo_.at(a), db = memo_.at(b);
    bool za = zero(da), zb = zero(db);

    switch (n.bop) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
        if (za && zb) return zero_of(n.type);
        // Literal zeros stay in place so each statement mirrors its node.
        return g_.add_binary(n.bop, widen_zero(da, n.type), widen_zero(db, n.type));

      case BinaryOp::Mul:
        if (za && zb) return zero_of(n.type);
        if (za) return scaled(a, db);
        if (zb) return scaled(b, da);
        return add(mul(da, b), mul(a, db));

      case BinaryOp::Div:
        if (za && zb) return zero_of(n.type);
        if (zb) return div(da, b);
        if (za) return neg(div(mul(a, db), mul(b, b)));
        return div(sub(mul(da, b), mul(a, db)), mul(b, b));
    }
    throw GraphError("unhandled binary op");
  }

  /// A scalar zero standing in for a vector-typed derivative operand gets
  /// widened so the sum rule type-checks.
  NodeId widen_zero(NodeId d, ValueType target) {
    if (g_.node(d).type == target) return d;
    if (zero(d) && g_.node(d).type == ValueType::Scalar) return zero_of(target);
    return d;
  }

  NodeId derive_swizzle(const Node& n) {
    NodeId du = memo_.at(n.operands[0]);
    if (zero(du)) return zero_of(n.type);
    const Node& dnode = g_.node(du);
    if (dnode.kind == NodeKind::Construct) {
      // Route components straight through the construct.
      if (n.swizzle_size == 1) return dnode.operands[n.swizzle[0]];
      std::vector<NodeId> comps;
      for (int i = 0; i < n.swizzle_size; ++i) comps.push_back(dnode.operands[n.swizzle[i]]);
      return g_.add_construct(comps);
    }
    return g_.add_swizzle(du, std::span<const std::uint8_t>(n.swizzle.data(), n.swizzle_size));
  }

  NodeId derive_call(const Node& n) {
    NodeId u = n.operands[0];
    NodeId du = memo_.at(u);
    ValueType t = n.type;

    switch (n.call) {
      case Builtin::Sin:
        return zero(du) ? zero_of(t) : scaled(call1(Builtin::Cos, u), du);
      case Builtin::Cos:
        return zero(du) ? zero_of(t) : scaled(neg(call1(Builtin::Sin, u)), du);
      case Builtin::Tan:
        return zero(du) ? zero_of(t)
                        : div(du, mul(call1(Builtin::Cos, u), call1(Builtin::Cos, u)));
      case Builtin::Asin:
        return zero(du) ? zero_of(t)
                        : div(du, call1(Builtin::Sqrt, sub(one_of(t), mul(u, u))));
      case Builtin::Acos:
        return zero(du) ? zero_of(t)
                        : neg(div(du, call1(Builtin::Sqrt, sub(one_of(t), mul(u, u)))));
      case Builtin::Atan:
        return zero(du) ? zero_of(t) : div(du, add(one_of(t), mul(u, u)));
      case Builtin::Exp: {
        if (zero(du)) return zero_of(t);
        NodeId self = current_node();
        return scaled(self, du);
      }
      case Builtin::Log:
        return zero(du) ? zero_of(t) : div(du, u);
      case Builtin::Sqrt: {
        if (zero(du)) return zero_of(t);
        NodeId self = current_node();
        return div(du, mul(const_of(t, 2.0), self));
      }
      case Builtin::Abs:
        return zero(du) ? zero_of(t) : scaled(call1(Builtin::Sign, u), du);
      case Builtin::Floor:
      case Builtin::Sign:
      case Builtin::Step:
        return zero_of(t);
      case Builtin::Fract:
        return zero(du) ? zero_of(t) : du;
      case Builtin::Mod:
        // Second argument treated as per-sample constant.
        return zero(du) ? zero_of(t) : du;

      case Builtin::Pow: {
        NodeId v = n.operands[1];
        NodeId dv = memo_.at(v);
        bool zu = zero(du), zv = zero(dv);
        if (zu && zv) return zero_of(t);
        NodeId self = current_node();
        // pow(u,v) * (v' * log u + v * u' / u), dropping zero terms.
        std::optional<NodeId> inner;
        if (!zv) inner = mul(dv, call1(Builtin::Log, u));
        if (!zu) {
          NodeId term = mul(v, div(du, u));
          inner = inner ? add(*inner, term) : term;
        }
        return mul(self, *inner);
      }

      case Builtin::Min: {
        NodeId b = n.operands[1];
        NodeId db = memo_.at(b);
        if (zero(du) && zero(db)) return zero_of(t);
        // Selects the first argument's derivative on ties.
        return call3(Builtin::Mix, widen_zero(db, t), widen_zero(du, t),
                     call2(Builtin::Step, u, b));
      }
      case Builtin::Max: {
        NodeId b = n.operands[1];
        NodeId db = memo_.at(b);
        if (zero(du) && zero(db)) return zero_of(t);
        return call3(Builtin::Mix, widen_zero(db, t), widen_zero(du, t),
                     call2(Builtin::Step, b, u));
      }
      case Builtin::Clamp: {
        NodeId lo = n.operands[1], hi = n.operands[2];
        NodeId dlo = memo_.at(lo), dhi = memo_.at(hi);
        if (zero(du) && zero(dlo) && zero(dhi)) return zero_of(t);
        // Derivative of min(max(u, lo), hi), branch selected per component.
        NodeId m = call2(Builtin::Max, u, lo);
        NodeId dm = call3(Builtin::Mix, widen_zero(dlo, t), widen_zero(du, t),
                          call2(Builtin::Step, lo, u));
        return call3(Builtin::Mix, widen_zero(dhi, t), dm, call2(Builtin::Step, m, hi));
      }
      case Builtin::Mix: {
        NodeId b = n.operands[1], tt = n.operands[2];
        NodeId db = memo_.at(b), dt = memo_.at(tt);
        bool za = zero(du), zb = zero(db), zt = zero(dt);
        if (za && zb && zt) return zero_of(t);
        std::optional<NodeId> sum;
        auto accumulate = [&](NodeId term) { sum = sum ? add(*sum, term) : term; };
        if (!za) accumulate(mul(du, sub(one_of(t), tt)));
        if (!zb) accumulate(mul(db, tt));
        if (!zt) accumulate(mul(sub(b, u), dt));
        return *sum;
      }

      case Builtin::Dot: {
        NodeId v = n.operands[1];
        NodeId dv = memo_.at(v);
        bool zu = zero(du), zv = zero(dv);
        if (zu && zv) return zero_of(t);
        std::optional<NodeId> sum;
        if (!zu) sum = call2(Builtin::Dot, du, v);
        if (!zv) {
          NodeId term = call2(Builtin::Dot, u, dv);
          sum = sum ? add(*sum, term) : term;
        }
        return *sum;
      }
      case Builtin::Cross: {
        NodeId v = n.operands[1];
        NodeId dv = memo_.at(v);
        bool zu = zero(du), zv = zero(dv);
        if (zu && zv) return zero_of(t);
        std::optional<NodeId> sum;
        if (!zu) sum = call2(Builtin::Cross, du, v);
        if (!zv) {
          NodeId term = call2(Builtin::Cross, u, dv);
          sum = sum ? add(*sum, term) : term;
        }
        return *sum;
      }
      case Builtin::Length: {
        if (zero(du)) return zero_of(t);
        NodeId self = current_node();
        return div(call2(Builtin::Dot, u, du), self);
      }
      case Builtin::Normalize: {
        if (zero(du)) return zero_of(t);
        ValueType vt = g_.node(u).type;
        NodeId len = call1(Builtin::Length, u);
        NodeId t1 = mul(du, widen(len, vt));
        NodeId q = div(call2(Builtin::Dot, u, du), len);
        NodeId t2 = mul(u, widen(q, vt));
        return div(sub(t1, t2), widen(mul(len, len), vt));
      }
    }
    throw GraphError("no derivative rule for builtin");
  }

  /// The value node currently being differentiated, for rules whose
  /// derivative reuses it (exp, sqrt, pow, length).
  NodeId current_node() const { return current_id_; }


  ExprGraph& g_;
  Wrt wrt_;
  std::unordered_map<NodeId, NodeId> memo_;
  std::optional<NodeId> zero_scalar_;
  std::array<std::optional<NodeId>, 3> zero_vec_;  // vec2, vec3, vec4
  std::optional<NodeId> seed_;
  NodeId current_id_ = 0;
};

}  // namespace

DiffResult differentiate(ExprGraph& graph, NodeId root, Wrt wrt) {
  if (root >= graph.size()) throw GraphError("unknown root node " + std::to_string(root));
  Differentiator d(graph, wrt);
  return d.run(root);
}

JacobianExpr jacobian(ExprGraph& graph, NodeId offset_root) {
  if (graph.node(offset_root).type != ValueType::Vec3)
    throw GraphError("jacobian expects a vec3 offset root");

  JacobianExpr jac;
  for (Wrt w : {Wrt::X, Wrt::Y, Wrt::Z}) {
    DiffResult r = differentiate(graph, offset_root, w);
    switch (w) {
      case Wrt::X: jac.d_dx = r.root; break;
      case Wrt::Y: jac.d_dy = r.root; break;
      case Wrt::Z: jac.d_dz = r.root; break;
    }
    for (auto [value, deriv] : r.derivative_by_value) {
      auto it = jac.origin.find(deriv);
      // A derivative node can serve several values (e.g. fract passes the
      // inner derivative through); keep the earliest defining value.
      if (it == jac.origin.end() || value < it->second.value)
        jac.origin[deriv] = {value, w};
    }
  }
  return jac;
}

}  // namespace warp
