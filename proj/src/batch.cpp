#include "warp/batch.hpp"

#include <cmath>

namespace warp {

std::string_view kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::Scalar: return "scalar";
    case KernelKind::Avx2: return "avx2";
    case KernelKind::Neon: return "neon";
  }
  return "?";
}

bool kernel_available(KernelKind k) {
  switch (k) {
    case KernelKind::Scalar:
      return true;
    case KernelKind::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case KernelKind::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

KernelKind best_kernel() {
  if (kernel_available(KernelKind::Avx2)) return KernelKind::Avx2;
  if (kernel_available(KernelKind::Neon)) return KernelKind::Neon;
  return KernelKind::Scalar;
}

BatchEvaluator::BatchEvaluator(const LinearProgram& program, KernelKind kernel)
    : tape_(compile_tape(program)), kernel_(kernel) {
  if (!kernel_available(kernel))
    throw Error("kernel '" + std::string(kernel_name(kernel)) + "' is not available on this CPU");
}

namespace {

double uniform_component(const Env& env, InputKind input, int component) {
  switch (input) {
    case InputKind::Position:
      return component == 0 ? env.position.x : component == 1 ? env.position.y : env.position.z;
    case InputKind::Normal:
      return component == 0 ? env.normal.x : component == 1 ? env.normal.y : env.normal.z;
    case InputKind::Millis:
      return env.millis;
    case InputKind::Mouse:
      return component == 0 ? env.mouse.x : env.mouse.y;
    case InputKind::Resolution:
      return component == 0 ? env.resolution.x : env.resolution.y;
  }
  return 0.0;
}

}  // namespace

void BatchEvaluator::run(const BatchInputs& inputs, std::size_t lanes, BatchOutputs& out) const {
  if (lanes == 0) throw Error("batch evaluation needs at least one lane");
  const std::size_t padded = (lanes + 3) & ~std::size_t{3};

  std::vector<double> regs(static_cast<std::size_t>(tape_.reg_count) * padded, 0.0);
  auto at = [&](std::uint32_t r) { return regs.data() + static_cast<std::size_t>(r) * padded; };

  for (const Tape::InputSlot& slot : tape_.inputs) {
    double* dst = at(slot.reg);
    std::span<const double> lane_data;
    if (slot.input == InputKind::Position)
      lane_data = inputs.position[slot.component];
    else if (slot.input == InputKind::Normal)
      lane_data = inputs.normal[slot.component];

    if (!lane_data.empty()) {
      if (lane_data.size() != lanes)
        throw Error("per-lane input '" + std::string(input_name(slot.input)) +
                    "' has the wrong length");
      for (std::size_t i = 0; i < lanes; ++i) dst[i] = lane_data[i];
      for (std::size_t i = lanes; i < padded; ++i) dst[i] = lane_data[0];
    } else {
      double v = uniform_component(inputs.uniforms, slot.input, slot.component);
      for (std::size_t i = 0; i < padded; ++i) dst[i] = v;
    }
  }

  switch (kernel_) {
    case KernelKind::Scalar: run_tape_scalar(tape_, regs.data(), padded); break;
    case KernelKind::Avx2: run_tape_avx2(tape_, regs.data(), padded); break;
    case KernelKind::Neon: run_tape_neon(tape_, regs.data(), padded); break;
  }

  auto copy_out = [&](const std::array<std::uint32_t, 3>& src,
                      std::array<std::vector<double>, 3>& dst) {
    for (int c = 0; c < 3; ++c) {
      const double* s = at(src[c]);
      dst[c].assign(s, s + lanes);
    }
  };
  copy_out(tape_.output_regs[0], out.offset);
  copy_out(tape_.output_regs[1], out.dodx);
  copy_out(tape_.output_regs[2], out.dody);
  copy_out(tape_.output_regs[3], out.dodz);

  out.nonfinite_lanes.clear();
  for (std::size_t i = 0; i < lanes; ++i) {
    bool ok = true;
    for (const auto* block : {&out.offset, &out.dodx, &out.dody, &out.dodz})
      for (int c = 0; c < 3; ++c) ok = ok && std::isfinite((*block)[c][i]);
    if (!ok) out.nonfinite_lanes.push_back(static_cast<std::uint32_t>(i));
  }
}

}  // namespace warp
