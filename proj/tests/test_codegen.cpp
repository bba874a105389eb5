#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "warp/autodiff.hpp"
#include "warp/dsl.hpp"
#include "warp/eval.hpp"
#include "warp/glsl.hpp"
#include "warp/linearize.hpp"

using namespace warp;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string corpus(const char* name) { return read_file(std::string(WARP_CORPUS_DIR) + "/" + name); }

struct Built {
  WarpProgram program;
  JacobianExpr jac;

  ProgramRoots roots() const { return {program.offset_root, jac, program.value_node_count}; }
};

Built build(const std::string& source) {
  Built b;
  b.program = compile_warp(source);
  b.jac = jacobian(b.program.graph, b.program.offset_root);
  return b;
}

std::size_t count_substr(const std::string& text, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

}  // namespace

TEST_CASE("number printing always has a decimal point") {
  CHECK(glsl_number(2.0) == "2.0");
  CHECK(glsl_number(0.5) == "0.5");
  CHECK(glsl_number(0.005) == "0.005");
  CHECK(glsl_number(-1.0) == "-1.0");
  CHECK(glsl_number(0.0) == "0.0");
  CHECK(glsl_number(100000.0).find('.') != std::string::npos);
  CHECK(glsl_number(0.00001).find('.') != std::string::npos);
}

TEST_CASE("zero warp emits four zero-vector outputs") {
  Built b = build("vec3(0.0, 0.0, 0.0)");
  for (int depth : {1, 8}) {
    LinearProgram lin = linearize(b.program.graph, b.roots(), depth);
    REQUIRE(lin.statements.size() == 4);
    std::string text = emit_glsl_snippet(lin);
    CHECK(text.find("vec3 offset = vec3(0.0, 0.0, 0.0);") != std::string::npos);
    CHECK(text.find("vec3 dodx = vec3(0.0);") != std::string::npos);
    CHECK(text.find("vec3 dody = vec3(0.0);") != std::string::npos);
    CHECK(text.find("vec3 dodz = vec3(0.0);") != std::string::npos);
  }
}

TEST_CASE("ripple warp at depth 1 matches the golden file byte for byte") {
  Built b = build(corpus("sine.warp"));
  LinearProgram lin = linearize(b.program.graph, b.roots(), 1);
  std::string text = emit_glsl_snippet(lin);
  CHECK(text == read_file(std::string(WARP_GOLDEN_DIR) + "/sine_depth1.glsl"));
}

TEST_CASE("ripple warp at depth 8 condenses to the golden form") {
  Built b = build(corpus("sine.warp"));
  LinearProgram lin = linearize(b.program.graph, b.roots(), 8);
  std::string text = emit_glsl_snippet(lin);
  CHECK(text == read_file(std::string(WARP_GOLDEN_DIR) + "/sine_depth8.glsl"));
  // the shared sine argument keeps a single named statement
  CHECK(lin.statements.size() == 5);
  CHECK(count_substr(text, "millis * 0.005") == 1);
}

TEST_CASE("world-space shader matches its golden file") {
  Built b = build(corpus("bulge.warp"));
  std::string shader =
      emit_vertex_shader(emit_glsl_snippet(linearize(b.program.graph, b.roots(), 8)),
                         ShaderSpace::World);
  CHECK(shader == read_file(std::string(WARP_GOLDEN_DIR) + "/bulge_shader_world.vert"));
}

TEST_CASE("depth-1 statements mirror the node-per-statement layout") {
  Built b = build(corpus("sine.warp"));
  LinearProgram lin = linearize(b.program.graph, b.roots(), 1);
  std::string text = emit_glsl_snippet(lin);

  // one value statement per non-trivial node, derivative statements paired
  CHECK(count_substr(text, "float v") == 5);
  CHECK(count_substr(text, "float d_v") == 4);
  CHECK(count_substr(text, "vec3 ") == 4);
  // the derivative chain keeps the literal zero of the sum rule
  CHECK(text.find("d_v3_d_y = 0.0 + d_v2_d_y") != std::string::npos);
  // and the chain factor stays inside its derivative statement
  CHECK(text.find("cos(v3) * d_v3_d_y") != std::string::npos);
}

TEST_CASE("integer literals print with a decimal point in emitted code") {
  Built b = build("vec3(position.x * 2, 0, 0)");
  LinearProgram lin = linearize(b.program.graph, b.roots(), 8);
  std::string text = emit_glsl_snippet(lin);
  CHECK(text.find("position.x * 2.0") != std::string::npos);
  CHECK(text.find(" 0.0") != std::string::npos);
  CHECK(text.find(" 2,") == std::string::npos);
}

TEST_CASE("emission is deterministic") {
  for (const char* name : {"sine.warp", "twist.warp", "genie.warp"}) {
    Built a = build(corpus(name));
    Built b = build(corpus(name));
    for (int depth : {1, 8}) {
      std::string ta = emit_glsl_snippet(linearize(a.program.graph, a.roots(), depth));
      std::string tb = emit_glsl_snippet(linearize(b.program.graph, b.roots(), depth));
      CHECK(ta == tb);
    }
  }
}

TEST_CASE("multi-consumer values are named exactly once at every depth") {
  Built b = build(corpus("twist.warp"));
  for (int depth : {1, 2, 4, 8, 16}) {
    LinearProgram lin = linearize(b.program.graph, b.roots(), depth);
    std::string text = emit_glsl_snippet(lin);
    // the angle's time term is multi-consumer through sa/ca and the chain
    // rule; its defining expression must appear exactly once
    CHECK(count_substr(text, "millis / 1000.0") == 1);
    // every target name is unique
    std::vector<std::string> names;
    for (const auto& s : lin.statements) names.push_back(s.name);
    std::sort(names.begin(), names.end());
    CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
  }
}

TEST_CASE("statements only reference earlier targets") {
  for (const char* name : {"twist.warp", "bulge.warp", "genie.warp"}) {
    Built b = build(corpus(name));
    for (int depth : {1, 4, 16}) {
      LinearProgram lin = linearize(b.program.graph, b.roots(), depth);
      for (std::size_t s = 0; s < lin.statements.size(); ++s) {
        std::vector<const LinExpr*> stack{&lin.statements[s].expr};
        while (!stack.empty()) {
          const LinExpr* e = stack.back();
          stack.pop_back();
          if (e->kind == LinExpr::Kind::Ref) CHECK(e->ref < s);
          for (const LinExpr& a : e->args) stack.push_back(&a);
        }
      }
    }
  }
}

TEST_CASE("linear programs agree with the graph across condensation depths") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coord(-8.0, 8.0);
  std::uniform_real_distribution<double> ms(0.0, 1e5);

  for (const char* name : {"sine.warp", "twist.warp", "flatten.warp", "bulge.warp", "genie.warp"}) {
    Built b = build(corpus(name));
    std::array<NodeId, 4> roots{b.program.offset_root, b.jac.d_dx, b.jac.d_dy, b.jac.d_dz};
    for (int depth : {1, 2, 4, 8, 16}) {
      LinearProgram lin = linearize(b.program.graph, b.roots(), depth);
      for (int i = 0; i < 25; ++i) {
        Env env;
        env.position = {coord(rng), coord(rng), coord(rng)};
        env.millis = ms(rng);
        env.mouse = {512.0, 256.0};
        LinearOutputs got = eval_linear(lin, env);
        auto want = eval_graph_many(b.program.graph, roots, env);
        const Vec3 gv[4] = {got.offset, got.dodx, got.dody, got.dodz};
        for (int r = 0; r < 4; ++r) {
          Vec3 w = want[r].vec3();
          CHECK(gv[r].x == w.x);
          CHECK(gv[r].y == w.y);
          CHECK(gv[r].z == w.z);
        }
      }
    }
  }
}

TEST_CASE("snippet parentheses are balanced") {
  for (const char* name : {"twist.warp", "bulge.warp", "genie.warp"}) {
    Built b = build(corpus(name));
    for (int depth : {1, 16}) {
      std::string text = emit_glsl_snippet(linearize(b.program.graph, b.roots(), depth));
      int depth_count = 0;
      for (char c : text) {
        if (c == '(') ++depth_count;
        if (c == ')') --depth_count;
        CHECK(depth_count >= 0);
      }
      CHECK(depth_count == 0);
    }
  }
}

TEST_CASE("condense depth must be at least one") {
  Built b = build("vec3(0.0, 0.0, 0.0)");
  CHECK_THROWS_AS(linearize(b.program.graph, b.roots(), 0), GraphError);
}

TEST_CASE("vertex shader wraps the snippet with the normal update") {
  Built b = build(corpus("sine.warp"));
  std::string snippet = emit_glsl_snippet(linearize(b.program.graph, b.roots(), 1));
  std::string shader = emit_vertex_shader(snippet, ShaderSpace::Model);

  CHECK(shader == read_file(std::string(WARP_GOLDEN_DIR) + "/sine_shader_model.vert"));

  CHECK(shader.find("attribute vec3 aPosition;") != std::string::npos);
  CHECK(shader.find("attribute vec3 aNormal;") != std::string::npos);
  CHECK(shader.find("(normal.y == 0. && normal.z == 0.)") != std::string::npos);
  CHECK(shader.find("vec3 v = normalize(cross(w, normal));") != std::string::npos);
  CHECK(shader.find("vec3 u = cross(v, normal);") != std::string::npos);
  CHECK(shader.find("mat3 jacobian = mat3(dodx, dody, dodz);") != std::string::npos);
  CHECK(shader.find("u + jacobian * u") != std::string::npos);
  CHECK(shader.find("gl_Position = uP * uVM * vec4(position, 1.);") != std::string::npos);
  CHECK(shader.find("vNormal = uN * normal;") != std::string::npos);

  // only the referenced uniforms are declared
  CHECK(shader.find("uniform float millis;") != std::string::npos);
  CHECK(shader.find("uniform vec2 mouse;") == std::string::npos);
  CHECK(shader.find("uniform vec2 resolution;") == std::string::npos);
}

TEST_CASE("zero warp shader declares no env uniforms") {
  Built b = build("vec3(0.0, 0.0, 0.0)");
  std::string shader =
      emit_vertex_shader(emit_glsl_snippet(linearize(b.program.graph, b.roots(), 8)),
                         ShaderSpace::Model);
  CHECK(shader.find("uniform float millis;") == std::string::npos);
  CHECK(shader.find("uniform mat4 uVM;") != std::string::npos);
}

TEST_CASE("world-space shader uses split matrices") {
  Built b = build(corpus("bulge.warp"));
  std::string shader =
      emit_vertex_shader(emit_glsl_snippet(linearize(b.program.graph, b.roots(), 8)),
                         ShaderSpace::World);
  CHECK(shader.find("uniform mat4 uM;") != std::string::npos);
  CHECK(shader.find("uniform mat4 uV;") != std::string::npos);
  CHECK(shader.find("uniform mat4 uVM;") == std::string::npos);
  CHECK(shader.find("vec3 position = (uM * vec4(aPosition, 1.)).xyz;") != std::string::npos);
  CHECK(shader.find("vec3 normal = normalize(uN * aNormal);") != std::string::npos);
  CHECK(shader.find("gl_Position = uP * uV * vec4(position, 1.);") != std::string::npos);
  CHECK(shader.find("uniform vec2 mouse;") != std::string::npos);
}

TEST_CASE("missing outputs are named in the error") {
  std::string no_dody = "vec3 offset = vec3(0.0);\nvec3 dodx = vec3(0.0);\nvec3 dodz = vec3(0.0);\n";
  try {
    emit_vertex_shader(no_dody, ShaderSpace::Model);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("dody") != std::string::npos);
  }
}
