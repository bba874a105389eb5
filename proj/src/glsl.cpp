#include "warp/glsl.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace warp {

std::string glsl_number(double value) {
  std::array<char, 40> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  std::string s(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
  if (s.find('.') != std::string::npos) return s;
  auto e = s.find_first_of("eE");
  if (e == std::string::npos) return s + ".0";
  return s.substr(0, e) + ".0" + s.substr(e);
}

namespace {

constexpr int kPrecAtom = 100;
constexpr int kPrecSwizzle = 90;
constexpr int kPrecUnary = 80;
constexpr int kPrecMulDiv = 60;
constexpr int kPrecAddSub = 50;

int precedence(const LinExpr& e) {
  switch (e.kind) {
    case LinExpr::Kind::Unary: return kPrecUnary;
    case LinExpr::Kind::Swizzle: return kPrecSwizzle;
    case LinExpr::Kind::Binary:
      return (e.bop == BinaryOp::Mul || e.bop == BinaryOp::Div) ? kPrecMulDiv : kPrecAddSub;
    default: return kPrecAtom;
  }
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
  }
  return '?';
}

constexpr char kComponent[] = {'x', 'y', 'z', 'w'};

void print_expr(std::ostringstream& os, const LinearProgram& program, const LinExpr& e);

void print_child(std::ostringstream& os, const LinearProgram& program, const LinExpr& child,
                 bool parens) {
  if (parens) os << '(';
  print_expr(os, program, child);
  if (parens) os << ')';
}

void print_expr(std::ostringstream& os, const LinearProgram& program, const LinExpr& e) {
  switch (e.kind) {
    case LinExpr::Kind::Ref:
      os << program.statements[e.ref].name;
      return;
    case LinExpr::Kind::Literal:
      os << glsl_number(e.literal);
      return;
    case LinExpr::Kind::Input:
      os << input_name(e.input);
      return;
    case LinExpr::Kind::Swizzle: {
      print_child(os, program, e.args[0], precedence(e.args[0]) < kPrecSwizzle);
      os << '.';
      for (int i = 0; i < e.swizzle_size; ++i) os << kComponent[e.swizzle[i]];
      return;
    }
    case LinExpr::Kind::Unary:
      os << '-';
      print_child(os, program, e.args[0], precedence(e.args[0]) <= kPrecUnary);
      return;
    case LinExpr::Kind::Binary: {
      int prec = precedence(e);
      print_child(os, program, e.args[0], precedence(e.args[0]) < prec);
      os << ' ' << binary_symbol(e.bop) << ' ';
      print_child(os, program, e.args[1], precedence(e.args[1]) <= prec);
      return;
    }
    case LinExpr::Kind::Call: {
      os << builtin_name(e.call) << '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, program, e.args[i]);
      }
      os << ')';
      return;
    }
    case LinExpr::Kind::Construct: {
      os << "vec" << e.args.size() << '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, program, e.args[i]);
      }
      os << ')';
      return;
    }
    case LinExpr::Kind::ZeroVec:
      os << glsl_type_name(e.type) << "(0.0)";
      return;
  }
}

}  // namespace

std::string emit_glsl_snippet(const LinearProgram& program) {
  std::ostringstream os;
  for (const LinStatement& stmt : program.statements) {
    os << glsl_type_name(stmt.type) << ' ' << stmt.name << " = ";
    print_expr(os, program, stmt.expr);
    os << ";\n";
  }
  return os.str();
}

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool references_word(std::string_view text, std::string_view word) {
  std::size_t pos = 0;
  while ((pos = text.find(word, pos)) != std::string_view::npos) {
    bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
    std::size_t end = pos + word.size();
    bool right_ok = end == text.size() || !is_word_char(text[end]);
    if (left_ok && right_ok) return true;
    pos += 1;
  }
  return false;
}

bool defines_output(std::string_view snippet, std::string_view name) {
  std::string decl = "vec3 " + std::string(name);
  std::size_t pos = 0;
  while ((pos = snippet.find(decl, pos)) != std::string_view::npos) {
    std::size_t end = pos + decl.size();
    if (end == snippet.size() || !is_word_char(snippet[end])) return true;
    pos += 1;
  }
  return false;
}

void append_indented(std::string& out, std::string_view block, std::string_view indent) {
  std::size_t start = 0;
  while (start < block.size()) {
    std::size_t end = block.find('\n', start);
    if (end == std::string_view::npos) end = block.size();
    if (end > start) {
      out += indent;
      out += block.substr(start, end - start);
    }
    out += '\n';
    start = end + 1;
  }
}

}  // namespace

std::string emit_vertex_shader(std::string_view snippet, ShaderSpace space) {
  for (std::string_view required : {"offset", "dodx", "dody", "dodz"})
    if (!defines_output(snippet, required))
      throw Error("generated block does not define '" + std::string(required) + "'");

  std::string out;
  out += "precision highp float;\n";
  out += "\n";
  out += "attribute vec3 aPosition;\n";
  out += "attribute vec3 aNormal;\n";
  out += "\n";
  if (space == ShaderSpace::Model) {
    out += "uniform mat4 uP;\n";
    out += "uniform mat4 uVM;\n";
    out += "uniform mat3 uN;\n";
  } else {
    out += "uniform mat4 uP;\n";
    out += "uniform mat4 uV;\n";
    out += "uniform mat4 uM;\n";
    out += "uniform mat3 uN;\n";
  }
  if (references_word(snippet, "millis")) out += "uniform float millis;\n";
  if (references_word(snippet, "mouse")) out += "uniform vec2 mouse;\n";
  if (references_word(snippet, "resolution")) out += "uniform vec2 resolution;\n";
  out += "\n";
  out += "varying vec3 vNormal;\n";
  out += "\n";
  out += "void main() {\n";
  if (space == ShaderSpace::Model) {
    out += "  vec3 position = aPosition;\n";
    out += "  vec3 normal = aNormal;\n";
  } else {
    out += "  vec3 position = (uM * vec4(aPosition, 1.)).xyz;\n";
    out += "  vec3 normal = normalize(uN * aNormal);\n";
  }
  out += "\n";
  append_indented(out, snippet, "  ");
  out += "\n";
  out += "  position += offset;\n";
  out += "  vec3 w = (normal.y == 0. && normal.z == 0.)\n";
  out += "    ? vec3(0., 1., 0.)\n";
  out += "    : vec3(1., 0., 0.);\n";
  out += "  vec3 v = normalize(cross(w, normal));\n";
  out += "  vec3 u = cross(v, normal);\n";
  out += "  mat3 jacobian = mat3(dodx, dody, dodz);\n";
  out += "  normal = normalize(cross(\n";
  out += "    u + jacobian * u,\n";
  out += "    v + jacobian * v\n";
  out += "  ));\n";
  out += "\n";
  if (space == ShaderSpace::Model) {
    out += "  gl_Position = uP * uVM * vec4(position, 1.);\n";
    out += "  vNormal = uN * normal;\n";
  } else {
    out += "  gl_Position = uP * uV * vec4(position, 1.);\n";
    out += "  vNormal = normal;\n";
  }
  out += "}\n";
  return out;
}

}  // namespace warp
