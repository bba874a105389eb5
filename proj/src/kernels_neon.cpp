// NEON kernel (aarch64), 2 doubles per step. min/max go through an explicit
// compare+select so they match the scalar a<b?a:b form on signed zeros,
// which vminq_f64/vmaxq_f64 do not.

#include <cmath>

#include "warp/batch.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace warp {

void run_tape_neon(const Tape& tape, double* regs, std::size_t padded) {
  auto at = [&](std::uint32_t r) { return regs + static_cast<std::size_t>(r) * padded; };

  const float64x2_t ones = vdupq_n_f64(1.0);
  const float64x2_t zeros = vdupq_n_f64(0.0);

  for (const TapeInst& inst : tape.code) {
    double* dst = at(inst.dst);
    const double* a = at(inst.a);
    const double* b = at(inst.b);

    switch (inst.op) {
      case TapeOp::Const: {
        float64x2_t v = vdupq_n_f64(inst.imm);
        for (std::size_t i = 0; i < padded; i += 2) vst1q_f64(dst + i, v);
        break;
      }
      case TapeOp::Copy:
        for (std::size_t i = 0; i < padded; i += 2) vst1q_f64(dst + i, vld1q_f64(a + i));
        break;
      case TapeOp::Add:
        for (std::size_t i = 0; i < padded; i += 2)
          vst1q_f64(dst + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        break;
      case TapeOp::Sub:
        for (std::size_t i = 0; i < padded; i += 2)
          vst1q_f64(dst + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        break;
      case TapeOp::Mul:
        for (std::size_t i = 0; i < padded; i += 2)
          vst1q_f64(dst + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        break;
      case TapeOp::Div:
        for (std::size_t i = 0; i < padded; i += 2)
          vst1q_f64(dst + i, vdivq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        break;
      case TapeOp::Neg:
        for (std::size_t i = 0; i < padded; i += 2) vst1q_f64(dst + i, vnegq_f64(vld1q_f64(a + i)));
        break;
      case TapeOp::Abs:
        for (std::size_t i = 0; i < padded; i += 2) vst1q_f64(dst + i, vabsq_f64(vld1q_f64(a + i)));
        break;
      case TapeOp::Min:
        for (std::size_t i = 0; i < padded; i += 2) {
          float64x2_t x = vld1q_f64(a + i), y = vld1q_f64(b + i);
          vst1q_f64(dst + i, vbslq_f64(vcltq_f64(x, y), x, y));
        }
        break;
      case TapeOp::Max:
        for (std::size_t i = 0; i < padded; i += 2) {
          float64x2_t x = vld1q_f64(a + i), y = vld1q_f64(b + i);
          vst1q_f64(dst + i, vbslq_f64(vcgtq_f64(x, y), x, y));
        }
        break;
      case TapeOp::Floor:
        for (std::size_t i = 0; i < padded; i += 2)
          vst1q_f64(dst + i, vrndmq_f64(vld1q_f64(a + i)));
        break;
      case TapeOp::Sqrt:
        for (std::size_t i = 0; i < padded; i += 2)
          vst1q_f64(dst + i, vsqrtq_f64(vld1q_f64(a + i)));
        break;
      case TapeOp::Step:
        for (std::size_t i = 0; i < padded; i += 2) {
          uint64x2_t lt = vcltq_f64(vld1q_f64(b + i), vld1q_f64(a + i));
          vst1q_f64(dst + i, vbslq_f64(lt, zeros, ones));
        }
        break;
      case TapeOp::Sign:
        for (std::size_t i = 0; i < padded; i += 2) {
          float64x2_t x = vld1q_f64(a + i);
          float64x2_t pos = vbslq_f64(vcgtq_f64(x, zeros), ones, zeros);
          float64x2_t neg = vbslq_f64(vcltq_f64(x, zeros), ones, zeros);
          vst1q_f64(dst + i, vsubq_f64(pos, neg));
        }
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

#else  // !__aarch64__

namespace warp {

void run_tape_neon(const Tape& tape, double* regs, std::size_t padded) {
  run_tape_scalar(tape, regs, padded);
}

}  // namespace warp

#endif
