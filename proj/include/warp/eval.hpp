#pragma once

#include <array>
#include <span>
#include <vector>

#include "warp/autodiff.hpp"
#include "warp/graph.hpp"
#include "warp/linearize.hpp"
#include "warp/vec.hpp"

namespace warp {

/// Runtime value of a node: `type` selects how many of the four lanes count.
struct Value {
  ValueType type = ValueType::Scalar;
  std::array<double, 4> v{};

  double scalar() const { return v[0]; }
  Vec3 vec3() const { return {v[0], v[1], v[2]}; }

  static Value scalar_of(double s) { return {ValueType::Scalar, {s, 0, 0, 0}}; }
  static Value vec3_of(const Vec3& a) { return {ValueType::Vec3, {a.x, a.y, a.z, 0}}; }
};

/// Uniform and per-vertex inputs an offset function may read.
struct Env {
  Vec3 position{};
  Vec3 normal{0.0, 0.0, 1.0};
  double millis = 0.0;
  Vec2 mouse{};
  Vec2 resolution{640.0, 480.0};
};

/// Double-precision evaluation of one root; each reachable node is computed
/// exactly once. Domain failures (log/sqrt of a negative, division by zero,
/// non-finite results) throw EvalError naming the node.
Value eval_graph(const ExprGraph& graph, NodeId root, const Env& env);

/// Evaluates several roots over one shared memo table.
std::vector<Value> eval_graph_many(const ExprGraph& graph, std::span<const NodeId> roots,
                                   const Env& env);

/// Full memo table indexed by node id; entries not reachable from `roots`
/// are default-constructed. Used by harnesses that inspect intermediates.
std::vector<Value> eval_reachable(const ExprGraph& graph, std::span<const NodeId> roots,
                                  const Env& env);

struct LinearOutputs {
  Vec3 offset;
  Vec3 dodx;
  Vec3 dody;
  Vec3 dodz;

  Mat3 jacobian() const { return {{dodx, dody, dodz}}; }
};

/// Executes statements in order; domain failures name the statement.
LinearOutputs eval_linear(const LinearProgram& program, const Env& env);

/// Central-difference columns: (f(p + h e_j) - f(p - h e_j)) / (2h).
Mat3 finite_diff_jacobian(const ExprGraph& graph, NodeId offset_root, const Env& env, double h);

/// Jacobian via the derivative graph at a point.
Mat3 ad_jacobian(const ExprGraph& graph, const JacobianExpr& jac, const Env& env);

/// det(I + J); zero exactly when -1 is an eigenvalue of J, i.e. when some
/// tangent direction collapses in the normal-update cross product.
double collapse_diagnostic(const Mat3& j);

}  // namespace warp
