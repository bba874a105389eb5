#include <cstring>
#include <unordered_map>

#include "warp/batch.hpp"

namespace warp {

namespace {

// Flattens statement expressions into per-component register ops. Component
// formulas mirror scalar_ops exactly; see eval.cpp for the scalar twins.
class TapeBuilder {
 public:
  explicit TapeBuilder(const LinearProgram& program) : program_(program) {}

  Tape run() {
    stmt_regs_.resize(program_.statements.size());
    for (std::size_t s = 0; s < program_.statements.size(); ++s) {
      const LinStatement& stmt = program_.statements[s];
      int n = component_count(stmt.type);
      for (int c = 0; c < n; ++c) stmt_regs_[s][c] = compile(stmt.expr, c);
    }
    for (int o = 0; o < 4; ++o) {
      std::uint32_t stmt = program_.outputs[o];
      for (int c = 0; c < 3; ++c) tape_.output_regs[o][c] = stmt_regs_[stmt][c];
    }
    return std::move(tape_);
  }

 private:
  std::uint32_t fresh() { return tape_.reg_count++; }

  std::uint32_t emit(TapeOp op, std::uint32_t a = 0, std::uint32_t b = 0, double imm = 0.0) {
    std::uint32_t dst = fresh();
    tape_.code.push_back({op, dst, a, b, imm});
    return dst;
  }

  std::uint32_t const_reg(double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof bits);
    if (auto it = const_regs_.find(bits); it != const_regs_.end()) return it->second;
    std::uint32_t r = emit(TapeOp::Const, 0, 0, value);
    const_regs_.emplace(bits, r);
    return r;
  }

  std::uint32_t input_reg(InputKind input, int component) {
    std::uint64_t key = (static_cast<std::uint64_t>(input) << 8) | static_cast<unsigned>(component);
    if (auto it = input_regs_.find(key); it != input_regs_.end()) return it->second;
    std::uint32_t r = fresh();
    tape_.inputs.push_back({input, component, r});
    input_regs_.emplace(key, r);
    return r;
  }

  std::uint32_t compile(const LinExpr& e, int comp) {
    std::uint64_t key = (reinterpret_cast<std::uintptr_t>(&e) << 2) | static_cast<unsigned>(comp);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::uint32_t r = compile_uncached(e, comp);
    memo_.emplace(key, r);
    return r;
  }

  std::uint32_t compile_uncached(const LinExpr& e, int comp) {
    switch (e.kind) {
      case LinExpr::Kind::Ref:
        return stmt_regs_[e.ref][comp];
      case LinExpr::Kind::Literal:
        return const_reg(e.literal);
      case LinExpr::Kind::Input:
        return input_reg(e.input, comp);
      case LinExpr::Kind::ZeroVec:
        return const_reg(0.0);
      case LinExpr::Kind::Swizzle:
        return compile(e.args[0], e.swizzle[comp]);
      case LinExpr::Kind::Construct:
        return compile(e.args[static_cast<std::size_t>(comp)], 0);
      case LinExpr::Kind::Unary:
        return emit(TapeOp::Neg, compile(e.args[0], comp));
      case LinExpr::Kind::Binary: {
        std::uint32_t a = compile(e.args[0], comp);
        std::uint32_t b = compile(e.args[1], comp);
        switch (e.bop) {
          case BinaryOp::Add: return emit(TapeOp::Add, a, b);
          case BinaryOp::Sub: return emit(TapeOp::Sub, a, b);
          case BinaryOp::Mul: return emit(TapeOp::Mul, a, b);
          case BinaryOp::Div: return emit(TapeOp::Div, a, b);
        }
        return 0;
      }
      case LinExpr::Kind::Call:
        return compile_call(e, comp);
    }
    return 0;
  }

  std::uint32_t dot_chain(const LinExpr& a, const LinExpr& b) {
    int n = component_count(a.type);
    std::uint32_t sum = 0;
    for (int c = 0; c < n; ++c) {
      std::uint32_t term = emit(TapeOp::Mul, compile(a, c), compile(b, c));
      sum = c == 0 ? term : emit(TapeOp::Add, sum, term);
    }
    return sum;
  }

  std::uint32_t compile_call(const LinExpr& e, int comp) {
    auto arg = [&](std::size_t i, int c) { return compile(e.args[i], c); };

    switch (e.call) {
      case Builtin::Sin: return emit(TapeOp::Sin, arg(0, comp));
      case Builtin::Cos: return emit(TapeOp::Cos, arg(0, comp));
      case Builtin::Tan: return emit(TapeOp::Tan, arg(0, comp));
      case Builtin::Asin: return emit(TapeOp::Asin, arg(0, comp));
      case Builtin::Acos: return emit(TapeOp::Acos, arg(0, comp));
      case Builtin::Atan: return emit(TapeOp::Atan, arg(0, comp));
      case Builtin::Exp: return emit(TapeOp::Exp, arg(0, comp));
      case Builtin::Log: return emit(TapeOp::Log, arg(0, comp));
      case Builtin::Sqrt: return emit(TapeOp::Sqrt, arg(0, comp));
      case Builtin::Abs: return emit(TapeOp::Abs, arg(0, comp));
      case Builtin::Floor: return emit(TapeOp::Floor, arg(0, comp));
      case Builtin::Sign: return emit(TapeOp::Sign, arg(0, comp));
      case Builtin::Fract: {
        std::uint32_t x = arg(0, comp);
        return emit(TapeOp::Sub, x, emit(TapeOp::Floor, x));
      }
      case Builtin::Pow: return emit(TapeOp::Pow, arg(0, comp), arg(1, comp));
      case Builtin::Mod: {
        // x - y * floor(x / y)
        std::uint32_t x = arg(0, comp), y = arg(1, comp);
        std::uint32_t f = emit(TapeOp::Floor, emit(TapeOp::Div, x, y));
        return emit(TapeOp::Sub, x, emit(TapeOp::Mul, y, f));
      }
      case Builtin::Min: return emit(TapeOp::Min, arg(0, comp), arg(1, comp));
      case Builtin::Max: return emit(TapeOp::Max, arg(0, comp), arg(1, comp));
      case Builtin::Step: return emit(TapeOp::Step, arg(0, comp), arg(1, comp));
      case Builtin::Clamp:
        return emit(TapeOp::Min, emit(TapeOp::Max, arg(0, comp), arg(1, comp)), arg(2, comp));
      case Builtin::Mix: {
        // x * (1 - t) + y * t
        std::uint32_t x = arg(0, comp), y = arg(1, comp), t = arg(2, comp);
        std::uint32_t s = emit(TapeOp::Sub, const_reg(1.0), t);
        return emit(TapeOp::Add, emit(TapeOp::Mul, x, s), emit(TapeOp::Mul, y, t));
      }
      case Builtin::Dot:
        return dot_chain(e.args[0], e.args[1]);
      case Builtin::Cross: {
        int i = (comp + 1) % 3, j = (comp + 2) % 3;
        std::uint32_t t1 = emit(TapeOp::Mul, arg(0, i), arg(1, j));
        std::uint32_t t2 = emit(TapeOp::Mul, arg(0, j), arg(1, i));
        return emit(TapeOp::Sub, t1, t2);
      }
      case Builtin::Length:
        return emit(TapeOp::Sqrt, dot_chain(e.args[0], e.args[0]));
      case Builtin::Normalize: {
        std::uint64_t key = reinterpret_cast<std::uintptr_t>(&e);
        auto it = length_regs_.find(key);
        std::uint32_t len;
        if (it != length_regs_.end()) {
          len = it->second;
        } else {
          len = emit(TapeOp::Sqrt, dot_chain(e.args[0], e.args[0]));
          length_regs_.emplace(key, len);
        }
        return emit(TapeOp::Div, arg(0, comp), len);
      }
    }
    return 0;
  }

  const LinearProgram& program_;
  Tape tape_;
  std::vector<std::array<std::uint32_t, 4>> stmt_regs_;
  std::unordered_map<std::uint64_t, std::uint32_t> const_regs_;
  std::unordered_map<std::uint64_t, std::uint32_t> input_regs_;
  std::unordered_map<std::uint64_t, std::uint32_t> memo_;
  std::unordered_map<std::uint64_t, std::uint32_t> length_regs_;
};

}  // namespace

Tape compile_tape(const LinearProgram& program) { return TapeBuilder(program).run(); }

}  // namespace warp
