#include "warp/graph.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>
#include <unordered_map>

namespace warp {

int component_count(ValueType t) {
  switch (t) {
    case ValueType::Scalar: return 1;
    case ValueType::Vec2: return 2;
    case ValueType::Vec3: return 3;
    case ValueType::Vec4: return 4;
  }
  return 1;
}

ValueType vector_type(int components) {
  switch (components) {
    case 1: return ValueType::Scalar;
    case 2: return ValueType::Vec2;
    case 3: return ValueType::Vec3;
    case 4: return ValueType::Vec4;
  }
  throw GraphError("vector width must be 1..4");
}

std::string_view type_name(ValueType t) {
  switch (t) {
    case ValueType::Scalar: return "scalar";
    case ValueType::Vec2: return "vec2";
    case ValueType::Vec3: return "vec3";
    case ValueType::Vec4: return "vec4";
  }
  return "?";
}

std::string_view glsl_type_name(ValueType t) {
  switch (t) {
    case ValueType::Scalar: return "float";
    case ValueType::Vec2: return "vec2";
    case ValueType::Vec3: return "vec3";
    case ValueType::Vec4: return "vec4";
  }
  return "?";
}

std::string_view input_name(InputKind k) {
  switch (k) {
    case InputKind::Position: return "position";
    case InputKind::Normal: return "normal";
    case InputKind::Millis: return "millis";
    case InputKind::Mouse: return "mouse";
    case InputKind::Resolution: return "resolution";
  }
  return "?";
}

ValueType input_type(InputKind k) {
  switch (k) {
    case InputKind::Position: return ValueType::Vec3;
    case InputKind::Normal: return ValueType::Vec3;
    case InputKind::Millis: return ValueType::Scalar;
    case InputKind::Mouse: return ValueType::Vec2;
    case InputKind::Resolution: return ValueType::Vec2;
  }
  return ValueType::Scalar;
}

std::optional<InputKind> input_by_name(std::string_view name) {
  for (int i = 0; i < kInputCount; ++i) {
    auto k = static_cast<InputKind>(i);
    if (input_name(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

struct BuiltinInfo {
  Builtin b;
  std::string_view name;
  int arity;
  bool in_dsl;
};

constexpr BuiltinInfo kBuiltins[] = {
    {Builtin::Sin, "sin", 1, true},
    {Builtin::Cos, "cos", 1, true},
    {Builtin::Tan, "tan", 1, true},
    {Builtin::Asin, "asin", 1, true},
    {Builtin::Acos, "acos", 1, true},
    {Builtin::Atan, "atan", 1, true},
    {Builtin::Exp, "exp", 1, true},
    {Builtin::Log, "log", 1, true},
    {Builtin::Sqrt, "sqrt", 1, true},
    {Builtin::Abs, "abs", 1, true},
    {Builtin::Floor, "floor", 1, true},
    {Builtin::Fract, "fract", 1, true},
    {Builtin::Pow, "pow", 2, true},
    {Builtin::Mod, "mod", 2, true},
    {Builtin::Min, "min", 2, true},
    {Builtin::Max, "max", 2, true},
    {Builtin::Clamp, "clamp", 3, true},
    {Builtin::Mix, "mix", 3, true},
    {Builtin::Dot, "dot", 2, true},
    {Builtin::Cross, "cross", 2, true},
    {Builtin::Length, "length", 1, true},
    {Builtin::Normalize, "normalize", 1, true},
    {Builtin::Sign, "sign", 1, false},
    {Builtin::Step, "step", 2, false},
};

const BuiltinInfo& info_of(Builtin b) {
  for (const auto& i : kBuiltins)
    if (i.b == b) return i;
  throw GraphError("unknown builtin");
}

bool is_componentwise(Builtin b) {
  switch (b) {
    case Builtin::Dot:
    case Builtin::Cross:
    case Builtin::Length:
    case Builtin::Normalize:
      return false;
    default:
      return true;
  }
}

}  // namespace

std::string_view builtin_name(Builtin b) { return info_of(b).name; }
int builtin_arity(Builtin b) { return info_of(b).arity; }

std::optional<Builtin> dsl_builtin_by_name(std::string_view name) {
  for (const auto& i : kBuiltins)
    if (i.in_dsl && i.name == name) return i.b;
  return std::nullopt;
}

ValueType infer_node_type(const ExprGraph& graph, const Node& node, NodeId own_id) {
  auto check_operand = [&](NodeId id) {
    if (id >= own_id)
      throw GraphError("operand id " + std::to_string(id) + " is not before node " +
                       std::to_string(own_id));
  };
  for (NodeId op : node.operands) check_operand(op);

  auto operand_type = [&](std::size_t i) { return graph.node(node.operands[i]).type; };
  auto require_arity = [&](std::size_t n, std::string_view what) {
    if (node.operands.size() != n)
      throw GraphError(std::string(what) + " expects " + std::to_string(n) + " operands, got " +
                       std::to_string(node.operands.size()));
  };

  switch (node.kind) {
    case NodeKind::Literal:
      require_arity(0, "literal");
      return ValueType::Scalar;

    case NodeKind::Input:
      require_arity(0, "input");
      return input_type(node.input);

    case NodeKind::Unary:
      require_arity(1, "unary op");
      return operand_type(0);

    case NodeKind::Binary: {
      require_arity(2, "binary op");
      if (operand_type(0) != operand_type(1))
        throw GraphError(std::string("binary op operands must have equal types, got ") +
                         std::string(type_name(operand_type(0))) + " and " +
                         std::string(type_name(operand_type(1))));
      return operand_type(0);
    }

    case NodeKind::Swizzle: {
      require_arity(1, "swizzle");
      ValueType src = operand_type(0);
      if (src == ValueType::Scalar) throw GraphError("cannot swizzle a scalar");
      if (node.swizzle_size < 1 || node.swizzle_size > 4)
        throw GraphError("swizzle must select 1..4 components");
      for (int i = 0; i < node.swizzle_size; ++i)
        if (node.swizzle[i] >= component_count(src))
          throw GraphError("swizzle component out of range for " + std::string(type_name(src)));
      return vector_type(node.swizzle_size);
    }

    case NodeKind::Construct: {
      if (node.operands.size() < 2 || node.operands.size() > 4)
        throw GraphError("vector construct expects 2..4 scalar operands");
      for (std::size_t i = 0; i < node.operands.size(); ++i)
        if (operand_type(i) != ValueType::Scalar)
          throw GraphError("vector construct operands must be scalar");
      return vector_type(static_cast<int>(node.operands.size()));
    }

    case NodeKind::Call: {
      const auto& info = info_of(node.call);
      require_arity(static_cast<std::size_t>(info.arity), info.name);
      if (is_componentwise(node.call)) {
        ValueType t = operand_type(0);
        for (std::size_t i = 1; i < node.operands.size(); ++i)
          if (operand_type(i) != t)
            throw GraphError(std::string(info.name) + " operands must have equal types");
        return t;
      }
      switch (node.call) {
        case Builtin::Dot: {
          ValueType t = operand_type(0);
          if (t == ValueType::Scalar || operand_type(1) != t)
            throw GraphError("dot expects two vectors of the same size");
          return ValueType::Scalar;
        }
        case Builtin::Cross:
          if (operand_type(0) != ValueType::Vec3 || operand_type(1) != ValueType::Vec3)
            throw GraphError("cross expects two vec3 operands");
          return ValueType::Vec3;
        case Builtin::Length:
          if (operand_type(0) == ValueType::Scalar)
            throw GraphError("length expects a vector");
          return ValueType::Scalar;
        case Builtin::Normalize:
          if (operand_type(0) == ValueType::Scalar)
            throw GraphError("normalize expects a vector");
          return operand_type(0);
        default:
          throw GraphError("unhandled builtin");
      }
    }
  }
  throw GraphError("unhandled node kind");
}

NodeId ExprGraph::push_node(Node node) {
  NodeId id = static_cast<NodeId>(nodes_.size());
  node.type = infer_node_type(*this, node, id);
  nodes_.push_back(std::move(node));
  return id;
}

NodeId ExprGraph::push_node_unchecked(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId ExprGraph::add_literal(double value) {
  Node n;
  n.kind = NodeKind::Literal;
  n.literal = value;
  return push_node(std::move(n));
}

NodeId ExprGraph::add_input(InputKind input) {
  auto& slot = inputs_[static_cast<int>(input)];
  if (slot) return *slot;
  Node n;
  n.kind = NodeKind::Input;
  n.input = input;
  NodeId id = push_node(std::move(n));
  slot = id;
  return id;
}

NodeId ExprGraph::add_unary(UnaryOp op, NodeId operand) {
  Node n;
  n.kind = NodeKind::Unary;
  n.uop = op;
  n.operands = {operand};
  return push_node(std::move(n));
}

NodeId ExprGraph::add_binary(BinaryOp op, NodeId lhs, NodeId rhs) {
  Node n;
  n.kind = NodeKind::Binary;
  n.bop = op;
  n.operands = {lhs, rhs};
  return push_node(std::move(n));
}

NodeId ExprGraph::add_call(Builtin b, std::span<const NodeId> args) {
  Node n;
  n.kind = NodeKind::Call;
  n.call = b;
  n.operands.assign(args.begin(), args.end());
  return push_node(std::move(n));
}

NodeId ExprGraph::add_swizzle(NodeId operand, std::span<const std::uint8_t> components) {
  Node n;
  n.kind = NodeKind::Swizzle;
  n.operands = {operand};
  n.swizzle_size = static_cast<std::uint8_t>(components.size());
  for (std::size_t i = 0; i < components.size() && i < 4; ++i) n.swizzle[i] = components[i];
  return push_node(std::move(n));
}

NodeId ExprGraph::add_construct(std::span<const NodeId> scalar_operands) {
  Node n;
  n.kind = NodeKind::Construct;
  n.operands.assign(scalar_operands.begin(), scalar_operands.end());
  return push_node(std::move(n));
}

std::vector<Violation> validate(const ExprGraph& graph) {
  std::vector<Violation> out;
  for (NodeId id = 0; id < graph.size(); ++id) {
    const Node& n = graph.node(id);
    try {
      ValueType t = infer_node_type(graph, n, id);
      if (t != n.type)
        out.push_back({id, "stored type " + std::string(type_name(n.type)) +
                               " does not match inferred " + std::string(type_name(t))});
    } catch (const GraphError& e) {
      out.push_back({id, e.what()});
    }
    if (n.kind == NodeKind::Input) {
      auto reg = graph.input_node(n.input);
      if (!reg || *reg != id)
        out.push_back({id, "duplicate node for input '" + std::string(input_name(n.input)) + "'"});
    }
  }
  return out;
}

std::vector<bool> reachable_set(const ExprGraph& graph, std::span<const NodeId> roots) {
  std::vector<bool> seen(graph.size(), false);
  std::vector<NodeId> stack;
  for (NodeId r : roots) {
    if (r >= graph.size()) throw GraphError("unknown root node " + std::to_string(r));
    if (!seen[r]) {
      seen[r] = true;
      stack.push_back(r);
    }
  }
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    for (NodeId op : graph.node(id).operands) {
      if (!seen[op]) {
        seen[op] = true;
        stack.push_back(op);
      }
    }
  }
  return seen;
}

std::vector<NodeId> topo_order(const ExprGraph& graph, std::span<const NodeId> roots) {
  auto seen = reachable_set(graph, roots);
  std::vector<NodeId> out;
  for (NodeId id = 0; id < graph.size(); ++id)
    if (seen[id]) out.push_back(id);
  return out;
}

bool is_constant_zero(const ExprGraph& graph, NodeId id) {
  const Node& n = graph.node(id);
  switch (n.kind) {
    case NodeKind::Literal:
      return n.literal == 0.0;
    case NodeKind::Construct:
      for (NodeId op : n.operands)
        if (!is_constant_zero(graph, op)) return false;
      return true;
    case NodeKind::Swizzle:
      return is_constant_zero(graph, n.operands[0]);
    default:
      return false;
  }
}

namespace {

std::string node_label(const Node& n) {
  std::ostringstream os;
  switch (n.kind) {
    case NodeKind::Literal: os << "literal " << n.literal; break;
    case NodeKind::Input: os << "input " << input_name(n.input); break;
    case NodeKind::Unary: os << "neg"; break;
    case NodeKind::Binary:
      switch (n.bop) {
        case BinaryOp::Add: os << "add"; break;
        case BinaryOp::Sub: os << "sub"; break;
        case BinaryOp::Mul: os << "mul"; break;
        case BinaryOp::Div: os << "div"; break;
      }
      break;
    case NodeKind::Call: os << builtin_name(n.call); break;
    case NodeKind::Swizzle: {
      os << "swizzle .";
      static constexpr char kComp[] = {'x', 'y', 'z', 'w'};
      for (int i = 0; i < n.swizzle_size; ++i) os << kComp[n.swizzle[i]];
      break;
    }
    case NodeKind::Construct: os << "vec" << n.operands.size(); break;
  }
  os << " [" << type_name(n.type) << "]";
  return os.str();
}

}  // namespace

std::string to_dot(const ExprGraph& graph, std::span<const NodeId> roots) {
  std::vector<bool> include;
  if (roots.empty())
    include.assign(graph.size(), true);
  else
    include = reachable_set(graph, roots);

  std::ostringstream os;
  os << "digraph warp {\n";
  os << "  rankdir=BT;\n";
  for (NodeId id = 0; id < graph.size(); ++id) {
    if (!include[id]) continue;
    os << "  n" << id << " [label=\"n" << id << ": " << node_label(graph.node(id)) << "\"];\n";
  }
  for (NodeId id = 0; id < graph.size(); ++id) {
    if (!include[id]) continue;
    for (NodeId op : graph.node(id).operands) os << "  n" << op << " -> n" << id << ";\n";
  }
  os << "}\n";
  return os.str();
}

namespace {

struct NodeKey {
  std::string bytes;
  bool operator==(const NodeKey& o) const { return bytes == o.bytes; }
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const { return std::hash<std::string>{}(k.bytes); }
};

NodeKey key_of(const Node& n, std::span<const NodeId> remapped) {
  NodeKey k;
  auto push = [&](const void* p, std::size_t len) {
    k.bytes.append(reinterpret_cast<const char*>(p), len);
  };
  push(&n.kind, sizeof n.kind);
  switch (n.kind) {
    case NodeKind::Literal: {
      // Bit-identical doubles only; 0.5 and 0.50 parse to the same bits,
      // 0.0 and -0.0 do not.
      std::uint64_t bits;
      std::memcpy(&bits, &n.literal, sizeof bits);
      push(&bits, sizeof bits);
      break;
    }
    case NodeKind::Input: push(&n.input, sizeof n.input); break;
    case NodeKind::Unary: push(&n.uop, sizeof n.uop); break;
    case NodeKind::Binary: push(&n.bop, sizeof n.bop); break;
    case NodeKind::Call: push(&n.call, sizeof n.call); break;
    case NodeKind::Swizzle:
      push(&n.swizzle_size, sizeof n.swizzle_size);
      push(n.swizzle.data(), n.swizzle_size);
      break;
    case NodeKind::Construct: break;
  }
  for (NodeId op : remapped) push(&op, sizeof op);
  return k;
}

}  // namespace

DedupResult dedup(const ExprGraph& graph, std::span<const NodeId> roots) {
  DedupResult result;
  std::unordered_map<NodeKey, NodeId, NodeKeyHash> interned;
  result.remap.resize(graph.size());

  for (NodeId id = 0; id < graph.size(); ++id) {
    Node n = graph.node(id);
    for (NodeId& op : n.operands) op = result.remap[op];
    NodeKey key = key_of(n, n.operands);
    auto it = interned.find(key);
    if (it != interned.end()) {
      result.remap[id] = it->second;
      continue;
    }
    NodeId fresh = n.kind == NodeKind::Input ? result.graph.add_input(n.input)
                                             : result.graph.push_node(std::move(n));
    interned.emplace(std::move(key), fresh);
    result.remap[id] = fresh;
  }

  result.roots.reserve(roots.size());
  for (NodeId r : roots) {
    if (r >= graph.size()) throw GraphError("unknown root node " + std::to_string(r));
    result.roots.push_back(result.remap[r]);
  }
  return result;
}

}  // namespace warp
