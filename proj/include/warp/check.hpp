#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "warp/autodiff.hpp"
#include "warp/dsl.hpp"
#include "warp/eval.hpp"

namespace warp {

struct CheckOptions {
  int samples = 1000;
  double tol_rel = 1e-4;
  double tol_abs = 1e-6;
  std::uint64_t seed = 0x5eed5eedULL;
  /// Depths exercised by the condensation-equivalence pass.
  std::vector<int> depths{1, 2, 4, 8, 16};
  int condensation_envs = 100;
  double condensation_tol = 1e-12;
};

struct WarpCheckReport {
  std::string warp;
  int samples = 0;          // accepted samples
  int excluded = 0;         // skipped near non-smooth loci
  int domain_errors = 0;    // skipped on evaluation failure
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  Env worst_sample;
  double worst_err = 0.0;
  bool derivatives_pass = false;
  double condensation_max_rel = 0.0;
  bool condensation_pass = false;
  std::string failure;  // empty unless something went structurally wrong

  bool pass() const { return derivatives_pass && condensation_pass && failure.empty(); }
};

/// Samples random environments (positions in [-10,10]^3, millis in [0,1e5]),
/// compares the derivative graph against central finite differences with
/// h = 1e-3 * max(1, |p|_inf), and checks linearized programs against the
/// graph evaluator across condensation depths.
WarpCheckReport check_warp(const std::string& name, WarpProgram& program,
                           const CheckOptions& options = {});

/// True when the offset value graph is within `margin` of a switching locus
/// of abs/min/max/clamp/floor/fract/mod/step/sign at this environment.
bool near_nonsmooth_locus(const ExprGraph& graph, NodeId offset_root, const Env& env,
                          double margin);

std::string report_text(std::span<const WarpCheckReport> reports);
std::string report_json(std::span<const WarpCheckReport> reports);

}  // namespace warp
