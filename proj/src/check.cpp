#include "warp/check.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "warp/linearize.hpp"

namespace warp {

namespace {

double linf(const Vec3& p) {
  return std::max(std::fabs(p.x), std::max(std::fabs(p.y), std::fabs(p.z)));
}

double to_int_distance(double u) { return std::fabs(u - std::nearbyint(u)); }

}  // namespace

bool near_nonsmooth_locus(const ExprGraph& graph, NodeId offset_root, const Env& env,
                          double margin) {
  auto memo = eval_reachable(graph, std::span<const NodeId>(&offset_root, 1), env);
  auto reach = reachable_set(graph, std::span<const NodeId>(&offset_root, 1));

  for (NodeId id = 0; id < graph.size(); ++id) {
    if (!reach[id]) continue;
    const Node& n = graph.node(id);
    if (n.kind != NodeKind::Call) continue;

    const Value& a = memo[n.operands[0]];
    int comps = component_count(a.type);
    double dist = std::numeric_limits<double>::infinity();

    switch (n.call) {
      case Builtin::Abs:
      case Builtin::Sign:
        for (int i = 0; i < comps; ++i) dist = std::min(dist, std::fabs(a.v[i]));
        break;
      case Builtin::Floor:
      case Builtin::Fract:
        for (int i = 0; i < comps; ++i) dist = std::min(dist, to_int_distance(a.v[i]));
        break;
      case Builtin::Mod: {
        const Value& k = memo[n.operands[1]];
        for (int i = 0; i < comps; ++i) {
          if (k.v[i] == 0.0) continue;
          dist = std::min(dist, to_int_distance(a.v[i] / k.v[i]) * std::fabs(k.v[i]));
        }
        break;
      }
      case Builtin::Min:
      case Builtin::Max:
      case Builtin::Step: {
        const Value& b = memo[n.operands[1]];
        for (int i = 0; i < comps; ++i) dist = std::min(dist, std::fabs(a.v[i] - b.v[i]));
        break;
      }
      case Builtin::Clamp: {
        const Value& lo = memo[n.operands[1]];
        const Value& hi = memo[n.operands[2]];
        for (int i = 0; i < comps; ++i)
          dist = std::min(dist, std::min(std::fabs(a.v[i] - lo.v[i]), std::fabs(a.v[i] - hi.v[i])));
        break;
      }
      default:
        continue;
    }
    if (dist < margin) return true;
  }
  return false;
}

namespace {

class EnvSampler {
 public:
  explicit EnvSampler(std::uint64_t seed) : rng_(seed) {}

  Env next() {
    Env env;
    env.position = {unit_(rng_) * 10.0, unit_(rng_) * 10.0, unit_(rng_) * 10.0};
    env.millis = half_(rng_) * 1e5;
    env.mouse = {half_(rng_) * 1920.0, half_(rng_) * 1080.0};
    env.resolution = {320.0 + half_(rng_) * 1600.0, 240.0 + half_(rng_) * 840.0};
    // Random unit normal, for offsets that read it.
    Vec3 n;
    do {
      n = {unit_(rng_), unit_(rng_), unit_(rng_)};
    } while (length(n) < 1e-3);
    env.normal = normalized(n);
    return env;
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{-1.0, 1.0};
  std::uniform_real_distribution<double> half_{0.0, 1.0};
};

}  // namespace

WarpCheckReport check_warp(const std::string& name, WarpProgram& program,
                           const CheckOptions& options) {
  WarpCheckReport report;
  report.warp = name;

  JacobianExpr jac = jacobian(program.graph, program.offset_root);
  ProgramRoots roots{program.offset_root, jac, program.value_node_count};

  // Derivative agreement against central differences.
  EnvSampler sampler(options.seed);
  const double rel_floor = options.tol_abs / options.tol_rel;
  int attempts = 0;
  const int max_attempts = options.samples * 50;
  while (report.samples < options.samples && attempts < max_attempts) {
    ++attempts;
    Env env = sampler.next();
    double h = 1e-3 * std::max(1.0, linf(env.position));
    double margin = std::max(1e-3, 4.0 * h);
    try {
      if (near_nonsmooth_locus(program.graph, program.offset_root, env, margin)) {
        ++report.excluded;
        continue;
      }
      Mat3 ad = ad_jacobian(program.graph, jac, env);
      Mat3 fd = finite_diff_jacobian(program.graph, program.offset_root, env, h);
      ++report.samples;
      for (int c = 0; c < 3; ++c) {
        const Vec3& a = ad.col[c];
        const Vec3& f = fd.col[c];
        for (int i = 0; i < 3; ++i) {
          double av = i == 0 ? a.x : i == 1 ? a.y : a.z;
          double fv = i == 0 ? f.x : i == 1 ? f.y : f.z;
          double err = std::fabs(av - fv);
          double rel = err / std::max(std::fabs(av), rel_floor);
          report.max_abs_err = std::max(report.max_abs_err, err);
          if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            report.worst_sample = env;
            report.worst_err = err;
          }
        }
      }
    } catch (const EvalError&) {
      ++report.domain_errors;
    }
  }
  report.derivatives_pass = report.max_rel_err <= options.tol_rel;
  if (report.samples < options.samples) {
    report.failure = "only " + std::to_string(report.samples) + " of " +
                     std::to_string(options.samples) + " samples were usable";
  }

  // Linearized programs must agree with the graph across condensation depths.
  EnvSampler cond_sampler(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Env> envs;
  for (int i = 0; i < options.condensation_envs; ++i) envs.push_back(cond_sampler.next());

  std::array<NodeId, 4> graph_roots{program.offset_root, jac.d_dx, jac.d_dy, jac.d_dz};
  for (int depth : options.depths) {
    LinearProgram lin = linearize(program.graph, roots, depth);
    for (const Env& env : envs) {
      LinearOutputs a;
      std::vector<Value> b;
      try {
        a = eval_linear(lin, env);
        b = eval_graph_many(program.graph, graph_roots, env);
      } catch (const EvalError&) {
        continue;  // domain failures are exercised elsewhere
      }
      const Vec3 got[4] = {a.offset, a.dodx, a.dody, a.dodz};
      for (int r = 0; r < 4; ++r) {
        Vec3 want = b[r].vec3();
        for (int i = 0; i < 3; ++i) {
          double gv = i == 0 ? got[r].x : i == 1 ? got[r].y : got[r].z;
          double wv = i == 0 ? want.x : i == 1 ? want.y : want.z;
          double rel = std::fabs(gv - wv) / std::max(1.0, std::fabs(wv));
          report.condensation_max_rel = std::max(report.condensation_max_rel, rel);
        }
      }
    }
  }
  report.condensation_pass = report.condensation_max_rel <= options.condensation_tol;

  return report;
}

namespace {

std::string env_text(const Env& e) {
  std::ostringstream os;
  os << "position=(" << e.position.x << ", " << e.position.y << ", " << e.position.z
     << ") millis=" << e.millis;
  return os.str();
}

}  // namespace

std::string report_text(std::span<const WarpCheckReport> reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    os << (r.pass() ? "PASS" : "FAIL") << "  " << r.warp << "\n";
    os << "      samples " << r.samples << " (excluded " << r.excluded << ", domain errors "
       << r.domain_errors << ")\n";
    os << "      jacobian max abs err " << r.max_abs_err << ", max rel err " << r.max_rel_err
       << (r.derivatives_pass ? "" : "  <-- over tolerance") << "\n";
    os << "      condensation max rel err " << r.condensation_max_rel
       << (r.condensation_pass ? "" : "  <-- over tolerance") << "\n";
    if (r.max_rel_err > 0.0)
      os << "      worst sample: " << env_text(r.worst_sample) << " (abs err " << r.worst_err
         << ")\n";
    if (!r.failure.empty()) os << "      " << r.failure << "\n";
  }
  int passed = 0;
  for (const auto& r : reports)
    if (r.pass()) ++passed;
  os << passed << "/" << reports.size() << " warps pass\n";
  return os.str();
}

std::string report_json(std::span<const WarpCheckReport> reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({
        {"warp", r.warp},
        {"samples", r.samples},
        {"max_abs_err", r.max_abs_err},
        {"max_rel_err", r.max_rel_err},
        {"degenerate_samples", r.excluded + r.domain_errors},
        {"pass", r.pass()},
    });
  }
  return arr.dump(2) + "\n";
}

}  // namespace warp
