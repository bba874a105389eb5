#pragma once

#include <unordered_map>
#include <utility>

#include "warp/graph.hpp"

namespace warp {

/// Position component a derivative is taken with respect to.
enum class Wrt : std::uint8_t { X, Y, Z };

std::string_view wrt_name(Wrt w);

struct DerivOrigin {
  NodeId value = 0;  // the node this derivative belongs to
  Wrt wrt = Wrt::X;
};

struct DiffResult {
  NodeId root = 0;
  /// value node id -> derivative node id, for every non-trivial node
  /// reachable from the differentiated root.
  std::unordered_map<NodeId, NodeId> derivative_by_value;
};

/// Appends derivative nodes for everything reachable from `root` and returns
/// the derivative of `root` itself. The position input seeds to the basis
/// vector for `wrt`; literals and every other input have zero derivative.
/// Existing nodes are never modified.
DiffResult differentiate(ExprGraph& graph, NodeId root, Wrt wrt);

/// The three Jacobian columns d(offset)/dx, d(offset)/dy, d(offset)/dz,
/// ordered to match a mat3(dodx, dody, dodz) assembly.
struct JacobianExpr {
  NodeId d_dx = 0;
  NodeId d_dy = 0;
  NodeId d_dz = 0;
  /// derivative node -> (value node, wrt); used for statement naming.
  std::unordered_map<NodeId, DerivOrigin> origin;

  NodeId column(Wrt w) const {
    switch (w) {
      case Wrt::X: return d_dx;
      case Wrt::Y: return d_dy;
      default: return d_dz;
    }
  }
};

JacobianExpr jacobian(ExprGraph& graph, NodeId offset_root);

}  // namespace warp
