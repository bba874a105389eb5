#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "warp/batch.hpp"
#include "warp/eval.hpp"
#include "warp/linearize.hpp"
#include "warp/vec.hpp"

namespace warp {

/// Indexed triangle mesh with baked per-vertex unit normals. Texture
/// coordinates are carried through untouched when present.
struct Mesh {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<std::array<std::uint32_t, 3>> faces;

  std::vector<std::string> texcoords;                    // raw "vt" payloads
  std::vector<std::array<std::int32_t, 3>> face_texcoords;  // -1 = none

  std::size_t vertex_count() const { return positions.size(); }
};

void validate_mesh(const Mesh& mesh);

struct TangentFrame {
  Vec3 u;
  Vec3 v;
};

/// Orthonormal tangent/bitangent with u x v = n, built from the normal
/// alone. n must be unit length within 1e-6.
TangentFrame tangent_frame(const Vec3& n);

struct VertexWarp {
  Vec3 position;
  Vec3 normal;
  bool degenerate = false;
};

/// p' = p + offset; n' = normalize((u + Ju) x (v + Jv)), or the zero vector
/// when the cross product collapses below 1e-12.
VertexWarp warp_vertex(const Vec3& p, const Vec3& n, const Vec3& offset, const Mat3& jacobian);

struct WarpMeshOptions {
  /// When set, vertices are moved to world space with this matrix (normals
  /// by its inverse-transpose) before the warp runs and stay in world space.
  std::optional<Mat4> model_matrix;
  KernelKind kernel = best_kernel();
};

struct WarpMeshResult {
  Mesh mesh;
  std::size_t degenerate_normals = 0;
  /// max over edges of warped length / original length.
  double max_edge_growth = 0.0;
};

WarpMeshResult warp_mesh(const Mesh& mesh, const LinearProgram& program, const Env& uniforms,
                         const WarpMeshOptions& options = {});

Mesh parse_obj(std::string_view text);
Mesh load_obj(const std::filesystem::path& path);
std::string obj_text(const Mesh& mesh);
void write_obj(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace warp
