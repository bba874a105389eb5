#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "warp/eval.hpp"
#include "warp/linearize.hpp"

namespace warp {

// A linear program compiled down to per-component register operations, run
// across a whole batch of environments at once (one register = one lane
// array). Arithmetic ops have SIMD kernels; transcendentals call libm per
// lane in every kernel so all kernels agree bit-for-bit.

enum class TapeOp : std::uint8_t {
  Const,  // dst = imm
  Copy,   // dst = a
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Abs,
  Min,
  Max,
  Floor,
  Sqrt,
  Step,  // dst = (b < a) ? 0 : 1, a = edge
  Sign,
  Sin,
  Cos,
  Tan,
  Asin,
  Acos,
  Atan,
  Exp,
  Log,
  Pow,
};

struct TapeInst {
  TapeOp op = TapeOp::Const;
  std::uint32_t dst = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double imm = 0.0;
};

struct Tape {
  std::uint32_t reg_count = 0;
  std::vector<TapeInst> code;

  struct InputSlot {
    InputKind input = InputKind::Position;
    int component = 0;
    std::uint32_t reg = 0;
  };
  std::vector<InputSlot> inputs;

  /// offset, dodx, dody, dodz; three component registers each.
  std::array<std::array<std::uint32_t, 3>, 4> output_regs{};
};

Tape compile_tape(const LinearProgram& program);

enum class KernelKind : std::uint8_t { Scalar, Avx2, Neon };

std::string_view kernel_name(KernelKind k);
bool kernel_available(KernelKind k);
/// Widest kernel the running CPU supports.
KernelKind best_kernel();

struct BatchInputs {
  /// Per-lane position components; required when the program reads position.
  std::array<std::span<const double>, 3> position{};
  /// Per-lane normal components; when empty the env normal broadcasts.
  std::array<std::span<const double>, 3> normal{};
  /// Uniform values for everything else.
  Env uniforms;
};

struct BatchOutputs {
  std::array<std::vector<double>, 3> offset;
  std::array<std::vector<double>, 3> dodx;
  std::array<std::vector<double>, 3> dody;
  std::array<std::vector<double>, 3> dodz;
  /// Lanes whose outputs came back non-finite (domain failures).
  std::vector<std::uint32_t> nonfinite_lanes;

  Vec3 offset_at(std::size_t i) const { return {offset[0][i], offset[1][i], offset[2][i]}; }
  Mat3 jacobian_at(std::size_t i) const {
    return {{{dodx[0][i], dodx[1][i], dodx[2][i]},
             {dody[0][i], dody[1][i], dody[2][i]},
             {dodz[0][i], dodz[1][i], dodz[2][i]}}};
  }
};

class BatchEvaluator {
 public:
  BatchEvaluator(const LinearProgram& program, KernelKind kernel);

  KernelKind kernel() const { return kernel_; }
  const Tape& tape() const { return tape_; }

  void run(const BatchInputs& inputs, std::size_t lanes, BatchOutputs& out) const;

 private:
  Tape tape_;
  KernelKind kernel_;
};

// Kernel entry points (register arrays of `padded` lanes each, `padded`
// always a multiple of the widest vector width).
void run_tape_scalar(const Tape& tape, double* regs, std::size_t padded);
void run_tape_avx2(const Tape& tape, double* regs, std::size_t padded);
void run_tape_neon(const Tape& tape, double* regs, std::size_t padded);

}  // namespace warp
