// AVX2 kernel, 4 doubles per step. Arithmetic ops use intrinsics whose
// results are IEEE-identical to the scalar path (add/sub/mul/div/sqrt are
// correctly rounded, min/max/floor/abs/neg match the scalar select and
// bit-mask forms). Transcendentals fall back to libm per lane, same calls
// as the scalar kernel, so any kernel pair agrees exactly.

#include <cmath>

#include "warp/batch.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace warp {

void run_tape_avx2(const Tape& tape, double* regs, std::size_t padded) {
  auto at = [&](std::uint32_t r) { return regs + static_cast<std::size_t>(r) * padded; };

  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d ones = _mm256_set1_pd(1.0);
  const __m256d zeros = _mm256_setzero_pd();

  for (const TapeInst& inst : tape.code) {
    double* dst = at(inst.dst);
    const double* a = at(inst.a);
    const double* b = at(inst.b);

    switch (inst.op) {
      case TapeOp::Const: {
        __m256d v = _mm256_set1_pd(inst.imm);
        for (std::size_t i = 0; i < padded; i += 4) _mm256_storeu_pd(dst + i, v);
        break;
      }
      case TapeOp::Copy:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_loadu_pd(a + i));
        break;
      case TapeOp::Add:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        break;
      case TapeOp::Sub:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        break;
      case TapeOp::Mul:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        break;
      case TapeOp::Div:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        break;
      case TapeOp::Neg:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_xor_pd(_mm256_loadu_pd(a + i), sign_mask));
        break;
      case TapeOp::Abs:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(a + i)));
        break;
      case TapeOp::Min:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_min_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        break;
      case TapeOp::Max:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        break;
      case TapeOp::Floor:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_floor_pd(_mm256_loadu_pd(a + i)));
        break;
      case TapeOp::Sqrt:
        for (std::size_t i = 0; i < padded; i += 4)
          _mm256_storeu_pd(dst + i, _mm256_sqrt_pd(_mm256_loadu_pd(a + i)));
        break;
      case TapeOp::Step:
        // (x < edge) ? 0 : 1, NaN -> 1, matching the scalar compare.
        for (std::size_t i = 0; i < padded; i += 4) {
          __m256d lt = _mm256_cmp_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(a + i), _CMP_LT_OQ);
          _mm256_storeu_pd(dst + i, _mm256_andnot_pd(lt, ones));
        }
        break;
      case TapeOp::Sign:
        for (std::size_t i = 0; i < padded; i += 4) {
          __m256d x = _mm256_loadu_pd(a + i);
          __m256d pos = _mm256_and_pd(_mm256_cmp_pd(x, zeros, _CMP_GT_OQ), ones);
          __m256d neg = _mm256_and_pd(_mm256_cmp_pd(x, zeros, _CMP_LT_OQ), ones);
          _mm256_storeu_pd(dst + i, _mm256_sub_pd(pos, neg));
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

#else  // !__AVX2__

namespace warp {

void run_tape_avx2(const Tape& tape, double* regs, std::size_t padded) {
  run_tape_scalar(tape, regs, padded);
}

}  // namespace warp

#endif
