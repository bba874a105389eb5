#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warp/diag.hpp"

namespace warp {

using NodeId = std::uint32_t;

enum class ValueType : std::uint8_t { Scalar, Vec2, Vec3, Vec4 };

int component_count(ValueType t);
ValueType vector_type(int components);
std::string_view type_name(ValueType t);       // "scalar", "vec2", ...
std::string_view glsl_type_name(ValueType t);  // "float", "vec2", ...

enum class InputKind : std::uint8_t { Position, Normal, Millis, Mouse, Resolution };
inline constexpr int kInputCount = 5;

std::string_view input_name(InputKind k);
ValueType input_type(InputKind k);
std::optional<InputKind> input_by_name(std::string_view name);

enum class UnaryOp : std::uint8_t { Neg };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div };

enum class Builtin : std::uint8_t {
  Sin,
  Cos,
  Tan,
  Asin,
  Acos,
  Atan,
  Exp,
  Log,
  Sqrt,
  Abs,
  Floor,
  Fract,
  Pow,
  Mod,
  Min,
  Max,
  Clamp,
  Mix,
  Dot,
  Cross,
  Length,
  Normalize,
  // Internal: produced by differentiation, printable as GLSL, not parseable.
  Sign,
  Step,
};

std::string_view builtin_name(Builtin b);
int builtin_arity(Builtin b);
/// Builtins the surface language exposes (excludes Sign/Step).
std::optional<Builtin> dsl_builtin_by_name(std::string_view name);

enum class NodeKind : std::uint8_t {
  Literal,
  Input,
  Unary,
  Binary,
  Call,
  Swizzle,
  Construct,
};

struct Node {
  NodeKind kind = NodeKind::Literal;
  ValueType type = ValueType::Scalar;
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  Builtin call = Builtin::Sin;
  InputKind input = InputKind::Position;
  double literal = 0.0;
  std::array<std::uint8_t, 4> swizzle{};
  std::uint8_t swizzle_size = 0;
  std::vector<NodeId> operands;
};

/// Append-only DAG of typed expression nodes. Operand ids are always
/// smaller than the ids that use them, so ascending id order is a
/// topological order by construction.
class ExprGraph {
 public:
  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[id]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  NodeId add_literal(double value);
  /// One node per input; repeated requests return the existing id.
  NodeId add_input(InputKind input);
  NodeId add_unary(UnaryOp op, NodeId operand);
  NodeId add_binary(BinaryOp op, NodeId lhs, NodeId rhs);
  NodeId add_call(Builtin b, std::span<const NodeId> args);
  NodeId add_swizzle(NodeId operand, std::span<const std::uint8_t> components);
  NodeId add_construct(std::span<const NodeId> scalar_operands);

  /// Generic validated append; throws GraphError on arity/type/operand issues.
  NodeId push_node(Node node);
  /// Appends without any checking. Exists so validate() has something to find.
  NodeId push_node_unchecked(Node node);

  std::optional<NodeId> input_node(InputKind input) const { return inputs_[static_cast<int>(input)]; }
  const std::array<std::optional<NodeId>, kInputCount>& inputs() const { return inputs_; }

 private:
  std::vector<Node> nodes_;
  std::array<std::optional<NodeId>, kInputCount> inputs_;
};

/// Checks arity, operand ordering, and type rules for one node assuming its
/// operands are already well-typed. Throws GraphError with a description.
ValueType infer_node_type(const ExprGraph& graph, const Node& node, NodeId own_id);

struct Violation {
  NodeId id = 0;
  std::string message;
};

/// Re-checks every node and the input registry. Empty result means valid.
std::vector<Violation> validate(const ExprGraph& graph);

/// Flags for all ids reachable from `roots` through operand edges.
std::vector<bool> reachable_set(const ExprGraph& graph, std::span<const NodeId> roots);

/// Exactly the nodes reachable from `roots`, ascending (= topological) order.
/// Throws GraphError for an unknown root.
std::vector<NodeId> topo_order(const ExprGraph& graph, std::span<const NodeId> roots);

/// True for a literal 0.0 or a construct whose operands are all known zero.
bool is_constant_zero(const ExprGraph& graph, NodeId id);

/// DOT dump of the nodes reachable from `roots` (all nodes when empty).
std::string to_dot(const ExprGraph& graph, std::span<const NodeId> roots);

struct DedupResult {
  ExprGraph graph;
  std::vector<NodeId> roots;
  /// old id -> new id, for remapping external references (e.g. derivative
  /// provenance). Merged nodes map to the earliest representative.
  std::vector<NodeId> remap;
};

/// Structural common-subexpression elimination. Literals merge only when
/// bit-identical. Off by default everywhere; callers opt in.
DedupResult dedup(const ExprGraph& graph, std::span<const NodeId> roots);

}  // namespace warp
