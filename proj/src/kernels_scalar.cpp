// Reference kernel: plain loops over the lane arrays. The SIMD kernels must
// reproduce this path bit-for-bit on every lane.

#include <cmath>

#include "warp/batch.hpp"
#include "warp/scalar_ops.hpp"

namespace warp {

void run_tape_scalar(const Tape& tape, double* regs, std::size_t padded) {
  auto at = [&](std::uint32_t r) { return regs + static_cast<std::size_t>(r) * padded; };

  for (const TapeInst& inst : tape.code) {
    double* dst = at(inst.dst);
    const double* a = at(inst.a);
    const double* b = at(inst.b);

    switch (inst.op) {
      case TapeOp::Const:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = inst.imm;
        break;
      case TapeOp::Copy:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = a[i];
        break;
      case TapeOp::Add:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::add(a[i], b[i]);
        break;
      case TapeOp::Sub:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::sub(a[i], b[i]);
        break;
      case TapeOp::Mul:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::mul(a[i], b[i]);
        break;
      case TapeOp::Div:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::div(a[i], b[i]);
        break;
      case TapeOp::Neg:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::neg(a[i]);
        break;
      case TapeOp::Abs:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::abs_(a[i]);
        break;
      case TapeOp::Min:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::min_(a[i], b[i]);
        break;
      case TapeOp::Max:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::max_(a[i], b[i]);
        break;
      case TapeOp::Floor:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::floor_(a[i]);
        break;
      case TapeOp::Sqrt:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::sqrt(a[i]);
        break;
      case TapeOp::Step:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::step(a[i], b[i]);
        break;
      case TapeOp::Sign:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = ops::sign(a[i]);
        break;
      case TapeOp::Sin:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::sin(a[i]);
        break;
      case TapeOp::Cos:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::cos(a[i]);
        break;
      case TapeOp::Tan:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::tan(a[i]);
        break;
      case TapeOp::Asin:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::asin(a[i]);
        break;
      case TapeOp::Acos:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::acos(a[i]);
        break;
      case TapeOp::Atan:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::atan(a[i]);
        break;
      case TapeOp::Exp:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::exp(a[i]);
        break;
      case TapeOp::Log:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::log(a[i]);
        break;
      case TapeOp::Pow:
        for (std::size_t i = 0; i < padded; ++i) dst[i] = std::pow(a[i], b[i]);
        break;
    }
  }
}

}  // namespace warp
