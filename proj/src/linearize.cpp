#include "warp/linearize.hpp"

#include <algorithm>
#include <unordered_map>

namespace warp {

namespace {

// Literal/input leaves and input swizzles are references, not computations;
// they always print inline and contribute nothing to expression depth.
bool is_trivial(const ExprGraph& g, NodeId id) {
  const Node& n = g.node(id);
  switch (n.kind) {
    case NodeKind::Literal:
    case NodeKind::Input:
      return true;
    case NodeKind::Swizzle:
      return g.node(n.operands[0]).kind == NodeKind::Input;
    default:
      return false;
  }
}

class Linearizer {
 public:
  Linearizer(const ExprGraph& graph, const ProgramRoots& roots, int depth)
      : g_(graph), roots_(roots), depth_(depth) {}

  LinearProgram run() {
    if (depth_ < 1) throw GraphError("condense depth must be >= 1");

    const std::array<NodeId, 3> columns{roots_.jac.d_dx, roots_.jac.d_dy, roots_.jac.d_dz};
    std::array<bool, 3> column_zero{};
    std::vector<NodeId> live_roots{roots_.offset};
    for (int c = 0; c < 3; ++c) {
      column_zero[c] = is_constant_zero(g_, columns[c]);
      if (!column_zero[c]) live_roots.push_back(columns[c]);
    }

    reach_ = reachable_set(g_, live_roots);
    is_root_.assign(g_.size(), false);
    for (NodeId r : live_roots) is_root_[r] = true;

    count_consumers();
    assign_value_numbers();
    plan_inlining();

    LinearProgram program;
    emit_statements(program, columns, column_zero);
    collect_inputs(program);
    return program;
  }

 private:
  // Depth weight: lowered value nodes and provenanced derivatives count 1;
  // helper nodes inside derivative formulas count 0.
  int weight(NodeId id) const {
    if (id < roots_.value_node_count) return 1;
    return roots_.jac.origin.count(id) ? 1 : 0;
  }

  void count_consumers() {
    consumers_.assign(g_.size(), 0);
    for (NodeId id = 0; id < g_.size(); ++id) {
      if (!reach_[id]) continue;
      for (NodeId op : g_.node(id).operands) ++consumers_[op];
    }
  }

  void assign_value_numbers() {
    v_num_.assign(g_.size(), 0);
    std::uint32_t next = 1;
    for (NodeId id = 0; id < g_.size() && id < roots_.value_node_count; ++id)
      if (reach_[id] && !is_trivial(g_, id)) v_num_[id] = next++;
  }

  void plan_inlining() {
    inlined_.assign(g_.size(), false);
    depth_of_.assign(g_.size(), 0);
    for (NodeId id = 0; id < g_.size(); ++id) {
      if (!reach_[id] || is_trivial(g_, id)) continue;
      int w = weight(id);
      int deepest = 0;
      for (NodeId op : g_.node(id).operands) {
        if (is_trivial(g_, op)) continue;
        if (consumers_[op] == 1 && !is_root_[op] && w + depth_of_[op] <= depth_) {
          inlined_[op] = true;
          deepest = std::max(deepest, depth_of_[op]);
        }
      }
      depth_of_[id] = w + deepest;
    }
  }

  std::string name_for(NodeId id) const {
    if (v_num_[id] != 0) return "v" + std::to_string(v_num_[id]);
    if (auto it = roots_.jac.origin.find(id); it != roots_.jac.origin.end()) {
      NodeId value = it->second.value;
      if (v_num_[value] != 0)
        return "d_v" + std::to_string(v_num_[value]) + "_d_" + std::string(wrt_name(it->second.wrt));
    }
    return {};  // helper; sequence-named during emission
  }

  LinExpr expr_of(NodeId id, bool as_statement_body) {
    if (!as_statement_body) {
      if (auto it = stmt_of_.find(id); it != stmt_of_.end()) {
        LinExpr e;
        e.kind = LinExpr::Kind::Ref;
        e.type = g_.node(id).type;
        e.ref = it->second;
        return e;
      }
    }

    const Node& n = g_.node(id);
    LinExpr e;
    e.type = n.type;
    switch (n.kind) {
      case NodeKind::Literal:
        e.kind = LinExpr::Kind::Literal;
        e.literal = n.literal;
        return e;
      case NodeKind::Input:
        e.kind = LinExpr::Kind::Input;
        e.input = n.input;
        return e;
      case NodeKind::Unary:
        e.kind = LinExpr::Kind::Unary;
        e.uop = n.uop;
        break;
      case NodeKind::Binary:
        e.kind = LinExpr::Kind::Binary;
        e.bop = n.bop;
        break;
      case NodeKind::Call:
        e.kind = LinExpr::Kind::Call;
        e.call = n.call;
        break;
      case NodeKind::Swizzle:
        e.kind = LinExpr::Kind::Swizzle;
        e.swizzle = n.swizzle;
        e.swizzle_size = n.swizzle_size;
        break;
      case NodeKind::Construct:
        e.kind = LinExpr::Kind::Construct;
        break;
    }
    e.args.reserve(n.operands.size());
    for (NodeId op : n.operands) e.args.push_back(expr_of(op, false));
    return e;
  }

  void emit_statements(LinearProgram& program, const std::array<NodeId, 3>& columns,
                       const std::array<bool, 3>& column_zero) {
    std::unordered_map<NodeId, std::string> output_name;
    output_name[roots_.offset] = "offset";
    static constexpr std::string_view kColumnNames[3] = {"dodx", "dody", "dodz"};
    for (int c = 0; c < 3; ++c)
      if (!column_zero[c]) output_name.emplace(columns[c], std::string(kColumnNames[c]));

    std::uint32_t helper_seq = 1;
    for (NodeId id = 0; id < g_.size(); ++id) {
      if (!reach_[id]) continue;
      bool named = is_root_[id] || (!is_trivial(g_, id) && !inlined_[id]);
      if (!named) continue;

      LinStatement stmt;
      stmt.type = g_.node(id).type;
      if (auto it = output_name.find(id); it != output_name.end()) {
        stmt.name = it->second;
        stmt.is_output = true;
      } else {
        stmt.name = name_for(id);
        if (stmt.name.empty()) stmt.name = "h" + std::to_string(helper_seq++);
      }
      stmt.expr = expr_of(id, true);
      stmt_of_[id] = static_cast<std::uint32_t>(program.statements.size());
      program.statements.push_back(std::move(stmt));
    }

    for (int c = 0; c < 3; ++c) {
      if (!column_zero[c]) continue;
      LinStatement stmt;
      stmt.name = std::string(kColumnNames[c]);
      stmt.type = ValueType::Vec3;
      stmt.expr.kind = LinExpr::Kind::ZeroVec;
      stmt.expr.type = ValueType::Vec3;
      stmt.is_output = true;
      stmt_of_[columns[c]] = static_cast<std::uint32_t>(program.statements.size());
      program.statements.push_back(std::move(stmt));
    }

    program.outputs[0] = stmt_of_.at(roots_.offset);
    for (int c = 0; c < 3; ++c) program.outputs[c + 1] = stmt_of_.at(columns[c]);
  }

  void collect_inputs(LinearProgram& program) {
    for (int i = 0; i < kInputCount; ++i) {
      auto node = g_.input_node(static_cast<InputKind>(i));
      if (node && reach_[*node]) program.inputs.push_back(static_cast<InputKind>(i));
    }
  }

  const ExprGraph& g_;
  const ProgramRoots& roots_;
  int depth_;
  std::vector<bool> reach_;
  std::vector<bool> is_root_;
  std::vector<std::uint32_t> consumers_;
  std::vector<std::uint32_t> v_num_;
  std::vector<bool> inlined_;
  std::vector<int> depth_of_;
  std::unordered_map<NodeId, std::uint32_t> stmt_of_;
};

}  // namespace

LinearProgram linearize(const ExprGraph& graph, const ProgramRoots& roots, int condense_depth) {
  return Linearizer(graph, roots, condense_depth).run();
}

}  // namespace warp
