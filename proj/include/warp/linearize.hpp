#pragma once

#include <array>
#include <string>
#include <vector>

#include "warp/autodiff.hpp"
#include "warp/graph.hpp"

namespace warp {

/// Expression tree of a single statement. References to other statements
/// appear as Ref leaves, so a statement never re-evaluates a named value.
struct LinExpr {
  enum class Kind : std::uint8_t {
    Ref,        // prior statement, by index
    Literal,
    Input,
    Swizzle,
    Unary,
    Binary,
    Call,
    Construct,
    ZeroVec,    // replacement for a constant-zero derivative column
  };

  Kind kind = Kind::Literal;
  ValueType type = ValueType::Scalar;
  std::uint32_t ref = 0;
  double literal = 0.0;
  InputKind input = InputKind::Position;
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  Builtin call = Builtin::Sin;
  std::array<std::uint8_t, 4> swizzle{};
  std::uint8_t swizzle_size = 0;
  std::vector<LinExpr> args;
};

struct LinStatement {
  std::string name;
  ValueType type = ValueType::Scalar;
  LinExpr expr;
  bool is_output = false;
};

struct LinearProgram {
  std::vector<LinStatement> statements;
  std::vector<InputKind> inputs;  // referenced inputs, registry order
  /// Statement indices of offset, dodx, dody, dodz.
  std::array<std::uint32_t, 4> outputs{};
};

struct ProgramRoots {
  NodeId offset = 0;
  JacobianExpr jac;
  /// Graph size after lowering (WarpProgram::value_node_count). Nodes below
  /// this line and provenanced derivatives count toward condensation depth;
  /// helper nodes created inside derivative formulas do not.
  std::size_t value_node_count = 0;
};

/// Orders reachable nodes into statements. A node is inlined into its
/// consumer when it has exactly one consumer and the consumer's expression
/// stays within `condense_depth`; multi-consumer nodes always get a named
/// statement. Constant-zero derivative columns become zero-vector outputs.
LinearProgram linearize(const ExprGraph& graph, const ProgramRoots& roots, int condense_depth);

}  // namespace warp
