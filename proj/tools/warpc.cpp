// warpc: compile offset functions to GLSL, apply them to meshes on the CPU,
// and verify their generated derivatives.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "warp/check.hpp"
#include "warp/dsl.hpp"
#include "warp/glsl.hpp"
#include "warp/mesh.hpp"
#include "warp/synth.hpp"

namespace fs = std::filesystem;
using namespace warp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitIo = 2;
constexpr int kExitMesh = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

struct CompiledWarp {
  WarpProgram program;
  JacobianExpr jac;

  ProgramRoots roots() const {
    return {program.offset_root, jac, program.value_node_count};
  }
};

WarpProgram compile_program(const fs::path& path) {
  std::string source = read_file(path);
  try {
    return compile_warp(source);
  } catch (const CompileError& e) {
    throw CompileError(path.filename().string() + ":" +
                           format_diagnostic(source, e.span(), e.what()),
                       e.span());
  }
}

CompiledWarp compile_file(const fs::path& path) {
  CompiledWarp out;
  out.program = compile_program(path);
  out.jac = jacobian(out.program.graph, out.program.offset_root);
  return out;
}

KernelKind parse_kernel(const std::string& name) {
  if (name == "auto") return best_kernel();
  if (name == "scalar") return KernelKind::Scalar;
  if (name == "avx2") return KernelKind::Avx2;
  if (name == "neon") return KernelKind::Neon;
  throw Error("unknown kernel '" + name + "'");
}

int run_codegen(const fs::path& warp_path, const fs::path& out_path, const std::string& mode,
                const std::string& space, int depth, bool cse) {
  CompiledWarp warp;
  warp.program = compile_program(warp_path);
  warp.jac = jacobian(warp.program.graph, warp.program.offset_root);

  if (cse) {
    // Deduplicate after differentiation, folding e.g. chain-rule factors
    // into equal value nodes; provenance follows the remap.
    std::array<NodeId, 4> roots{warp.program.offset_root, warp.jac.d_dx, warp.jac.d_dy,
                                warp.jac.d_dz};
    DedupResult d = dedup(warp.program.graph, roots);

    JacobianExpr merged;
    merged.d_dx = d.roots[1];
    merged.d_dy = d.roots[2];
    merged.d_dz = d.roots[3];
    for (const auto& [deriv, origin] : warp.jac.origin) {
      NodeId nd = d.remap[deriv];
      DerivOrigin no{d.remap[origin.value], origin.wrt};
      auto it = merged.origin.find(nd);
      if (it == merged.origin.end() || no.value < it->second.value) merged.origin[nd] = no;
    }

    NodeId value_end = 0;
    for (NodeId id = 0; id < warp.program.value_node_count; ++id)
      value_end = std::max(value_end, d.remap[id] + 1);

    warp.program.graph = std::move(d.graph);
    warp.program.offset_root = d.roots[0];
    warp.program.value_node_count = value_end;
    warp.jac = std::move(merged);
  }

  LinearProgram lin = linearize(warp.program.graph, warp.roots(), depth);
  std::string snippet = emit_glsl_snippet(lin);
  std::string text = mode == "shader"
                         ? emit_vertex_shader(snippet, space == "world" ? ShaderSpace::World
                                                                        : ShaderSpace::Model)
                         : snippet;

  if (out_path == "-")
    std::cout << text;
  else
    write_file(out_path, text);

  std::cerr << "graph nodes: " << warp.program.graph.size()
            << ", statements: " << lin.statements.size() << "\n";
  return kExitOk;
}

bool parse_pair(const std::string& text, Vec2& out) {
  return std::sscanf(text.c_str(), "%lf,%lf", &out.x, &out.y) == 2;
}

int run_apply(const fs::path& warp_path, const fs::path& mesh_path, const fs::path& out_path,
              double millis, const std::string& mouse, const std::string& resolution,
              const std::vector<double>& model_matrix, const std::string& kernel,
              double warn_edge_length) {
  CompiledWarp warp = compile_file(warp_path);
  Mesh mesh = load_obj(mesh_path);

  Env env;
  env.millis = millis;
  if (!mouse.empty() && !parse_pair(mouse, env.mouse)) throw Error("--mouse expects X,Y");
  if (!resolution.empty() && !parse_pair(resolution, env.resolution))
    throw Error("--resolution expects W,H");

  WarpMeshOptions options;
  options.kernel = parse_kernel(kernel);
  if (!model_matrix.empty()) {
    if (model_matrix.size() != 16) throw Error("--model-matrix expects 16 values, row-major");
    Mat4 m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m.m[r][c] = model_matrix[static_cast<std::size_t>(r) * 4 + c];
    options.model_matrix = m;
  }

  LinearProgram lin = linearize(warp.program.graph, warp.roots(), 8);
  WarpMeshResult result = warp_mesh(mesh, lin, env, options);
  write_obj(result.mesh, out_path);

  std::cout << "vertices: " << result.mesh.vertex_count()
            << ", degenerate normals: " << result.degenerate_normals
            << ", max edge growth: " << result.max_edge_growth << "\n";
  if (result.max_edge_growth > warn_edge_length)
    std::cerr << "warning: edges grew up to " << result.max_edge_growth
              << "x; the mesh may be too coarse for this warp\n";
  return kExitOk;
}

int run_check(const std::vector<fs::path>& warp_paths, const fs::path& corpus, int samples,
              double tol, const std::string& json_path) {
  std::vector<fs::path> paths = warp_paths;
  if (!corpus.empty()) {
    if (!fs::is_directory(corpus)) throw IoError("'" + corpus.string() + "' is not a directory");
    for (const auto& entry : fs::directory_iterator(corpus))
      if (entry.path().extension() == ".warp") paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
  }
  if (paths.empty()) throw Error("nothing to check; pass --warp or --corpus");

  CheckOptions options;
  options.samples = samples;
  options.tol_rel = tol;
  options.tol_abs = tol * 1e-2;  // keep the default floor ratio

  std::vector<WarpCheckReport> reports;
  bool all_pass = true;
  for (const fs::path& path : paths) {
    WarpProgram program = compile_program(path);
    WarpCheckReport report = check_warp(path.filename().string(), program, options);

    // Optional golden snippet alongside the warp.
    fs::path expect = path;
    expect.replace_extension(".expect");
    if (fs::exists(expect)) {
      // check_warp extended the graph; regenerate from a clean compile.
      CompiledWarp fresh = compile_file(path);
      LinearProgram lin = linearize(fresh.program.graph, fresh.roots(), 1);
      if (emit_glsl_snippet(lin) != read_file(expect))
        report.failure = "generated snippet differs from " + expect.filename().string();
    }

    all_pass = all_pass && report.pass();
    reports.push_back(std::move(report));
  }

  std::cout << report_text(reports);
  if (!json_path.empty()) {
    std::string json = report_json(reports);
    if (json_path == "-")
      std::cout << json;
    else
      write_file(json_path, json);
  }
  return all_pass ? kExitOk : kExitDiagnostics;
}

int run_show(const fs::path& warp_path, bool dot, int linear_depth) {
  CompiledWarp warp = compile_file(warp_path);
  if (dot) {
    std::cout << to_dot(warp.program.graph,
                        std::span<const NodeId>(&warp.program.offset_root, 1));
    return kExitOk;
  }
  LinearProgram lin = linearize(warp.program.graph, warp.roots(), linear_depth);
  std::cout << emit_glsl_snippet(lin);
  return kExitOk;
}

int run_bench(int vertices, int nodes, int repeat, std::uint64_t seed,
              const std::string& kernel) {
  using clock = std::chrono::steady_clock;

  std::string source = make_stacked_sine_source(static_cast<std::size_t>(nodes), seed);

  auto t0 = clock::now();
  WarpProgram program = compile_warp(source);
  JacobianExpr jac = jacobian(program.graph, program.offset_root);
  ProgramRoots roots{program.offset_root, jac, program.value_node_count};
  LinearProgram lin = linearize(program.graph, roots, 8);
  std::string shader = emit_vertex_shader(emit_glsl_snippet(lin), ShaderSpace::Model);
  auto t1 = clock::now();

  int rings = std::max(1, static_cast<int>(std::sqrt(std::max(1, vertices) / 2.0)));
  Mesh mesh = make_uv_sphere(rings, 2 * rings + 1);

  WarpMeshOptions options;
  options.kernel = parse_kernel(kernel);
  Env env;
  env.millis = 1234.0;

  double best_seconds = 1e30;
  WarpMeshResult result;
  for (int r = 0; r < std::max(1, repeat); ++r) {
    auto w0 = clock::now();
    result = warp_mesh(mesh, lin, env, options);
    auto w1 = clock::now();
    best_seconds = std::min(best_seconds, std::chrono::duration<double>(w1 - w0).count());
  }

  double codegen_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  double vps = static_cast<double>(mesh.vertex_count()) / best_seconds;
  std::cout << "warp graph: " << program.graph.size() << " nodes ("
            << lin.statements.size() << " statements, " << shader.size() << " bytes of shader)\n";
  std::cout << "codegen: " << codegen_ms << " ms\n";
  std::cout << "mesh: " << mesh.vertex_count() << " vertices, kernel "
            << kernel_name(options.kernel) << "\n";
  std::cout << "warp_mesh: " << best_seconds * 1e3 << " ms best of " << repeat << " ("
            << static_cast<long long>(vps) << " vertices/s)\n";
  std::cout << "degenerate normals: " << result.degenerate_normals << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"domain-warp shader compiler and CPU verifier"};
  app.require_subcommand(1);

  // codegen
  auto* codegen = app.add_subcommand("codegen", "emit GLSL for a warp");
  std::string cg_warp, cg_out = "-", cg_mode = "snippet", cg_space = "model";
  int cg_depth = 8;
  bool cg_cse = false;
  codegen->add_option("--warp", cg_warp, "warp source file")->required();
  codegen->add_option("--out", cg_out, "output file, '-' for stdout");
  codegen->add_option("--mode", cg_mode, "snippet | shader")
      ->check(CLI::IsMember({"snippet", "shader"}));
  codegen->add_option("--space", cg_space, "model | world")
      ->check(CLI::IsMember({"model", "world"}));
  codegen->add_option("--condense-depth", cg_depth, "statement inlining depth (>= 1)");
  codegen->add_flag("--cse", cg_cse, "deduplicate identical subexpressions first");

  // apply
  auto* apply = app.add_subcommand("apply", "warp an OBJ mesh on the CPU");
  std::string ap_warp, ap_mesh, ap_out, ap_mouse, ap_resolution, ap_kernel = "auto";
  double ap_millis = 0.0, ap_warn_growth = 3.0;
  std::vector<double> ap_matrix;
  apply->add_option("--warp", ap_warp, "warp source file")->required();
  apply->add_option("--mesh", ap_mesh, "input OBJ")->required();
  apply->add_option("--out", ap_out, "output OBJ")->required();
  apply->add_option("--millis", ap_millis, "time uniform, milliseconds");
  apply->add_option("--mouse", ap_mouse, "mouse uniform, X,Y");
  apply->add_option("--resolution", ap_resolution, "resolution uniform, W,H");
  apply->add_option("--model-matrix", ap_matrix,
                    "16 row-major values; warp runs in world space")
      ->expected(16);
  apply->add_option("--kernel", ap_kernel, "auto | scalar | avx2 | neon");
  apply->add_option("--warn-edge-length", ap_warn_growth,
                    "warn when edges grow by more than this factor");

  // check
  auto* check = app.add_subcommand("check", "verify derivatives against finite differences");
  std::vector<std::string> ck_warps;
  std::string ck_corpus, ck_json;
  int ck_samples = 1000;
  double ck_tol = 1e-4;
  check->add_option("--warp", ck_warps, "warp source file (repeatable)");
  check->add_option("--corpus", ck_corpus, "directory of .warp files");
  check->add_option("--samples", ck_samples, "random samples per warp");
  check->add_option("--tol", ck_tol, "max relative Jacobian error");
  check->add_option("--json", ck_json, "write a JSON report ('-' for stdout)");

  // show
  auto* show = app.add_subcommand("show", "dump the expression graph or linear program");
  std::string sh_warp;
  bool sh_dot = false;
  int sh_linear = 0;
  show->add_option("--warp", sh_warp, "warp source file")->required();
  show->add_flag("--dot", sh_dot, "DOT dump of the offset graph");
  show->add_option("--linear", sh_linear, "print the linear program at this depth");

  // bench
  auto* bench = app.add_subcommand("bench", "synthetic throughput measurement");
  int bm_vertices = 14000, bm_nodes = 150, bm_repeat = 5;
  std::uint64_t bm_seed = 7;
  std::string bm_kernel = "auto";
  bench->add_option("--vertices", bm_vertices, "approximate mesh size");
  bench->add_option("--nodes", bm_nodes, "target graph size");
  bench->add_option("--repeat", bm_repeat, "timing repetitions");
  bench->add_option("--seed", bm_seed, "generator seed");
  bench->add_option("--kernel", bm_kernel, "auto | scalar | avx2 | neon");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*codegen) return run_codegen(cg_warp, cg_out, cg_mode, cg_space, cg_depth, cg_cse);
    if (*apply)
      return run_apply(ap_warp, ap_mesh, ap_out, ap_millis, ap_mouse, ap_resolution, ap_matrix,
                       ap_kernel, ap_warn_growth);
    if (*check) {
      std::vector<fs::path> paths(ck_warps.begin(), ck_warps.end());
      return run_check(paths, ck_corpus, ck_samples, ck_tol, ck_json);
    }
    if (*show) {
      if (!sh_dot && sh_linear < 1) throw Error("pass --dot or --linear N");
      return run_show(sh_warp, sh_dot, sh_linear);
    }
    if (*bench) return run_bench(bm_vertices, bm_nodes, bm_repeat, bm_seed, bm_kernel);
  } catch (const CompileError& e) {
    std::cerr << e.what() << "\n";
    return kExitDiagnostics;
  } catch (const EvalError& e) {
    std::cerr << "error: " << e.what() << " (" << e.where() << ")\n";
    return kExitDiagnostics;
  } catch (const MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return kExitMesh;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiagnostics;
  }
  return kExitOk;
}
