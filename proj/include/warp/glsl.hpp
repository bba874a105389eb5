#pragma once

#include <string>
#include <string_view>

#include "warp/linearize.hpp"

namespace warp {

/// Shortest round-trip decimal with a guaranteed decimal point, so every
/// emitted number is a valid GLSL float literal ("2" becomes "2.0").
std::string glsl_number(double value);

/// Prints the statement block declaring offset, dodx, dody, dodz.
/// Deterministic: byte-identical output for identical programs.
std::string emit_glsl_snippet(const LinearProgram& program);

enum class ShaderSpace : std::uint8_t { Model, World };

/// Wraps a snippet in a complete GLSL ES 1.00 vertex shader that applies the
/// offset and rebuilds the normal from the Jacobian columns. Throws Error if
/// the snippet does not define all four outputs.
std::string emit_vertex_shader(std::string_view snippet, ShaderSpace space);

}  // namespace warp
