#include "warp/mesh.hpp"

#include <cmath>

namespace warp {

bool inverse_transpose(const Mat3& in, Mat3& out) {
  // Adjugate of the columns, transposed twice over.
  Vec3 r0{in.col[0].x, in.col[1].x, in.col[2].x};
  Vec3 r1{in.col[0].y, in.col[1].y, in.col[2].y};
  Vec3 r2{in.col[0].z, in.col[1].z, in.col[2].z};
  double det = dot(r0, cross(r1, r2));
  if (std::fabs(det) < 1e-12) return false;
  // inverse rows are adjugate columns / det; inverse-transpose columns are
  // therefore the adjugate columns themselves / det.
  Vec3 c0 = cross(r1, r2) / det;
  Vec3 c1 = cross(r2, r0) / det;
  Vec3 c2 = cross(r0, r1) / det;
  out = {{c0, c1, c2}};
  return true;
}

void validate_mesh(const Mesh& mesh) {
  if (mesh.positions.size() != mesh.normals.size())
    throw MeshError("positions and normals must have the same length");
  for (const auto& f : mesh.faces)
    for (std::uint32_t idx : f)
      if (idx >= mesh.positions.size())
        throw MeshError("face index " + std::to_string(idx) + " is out of range");
  if (!mesh.face_texcoords.empty() && mesh.face_texcoords.size() != mesh.faces.size())
    throw MeshError("face texcoords must parallel faces");
}

TangentFrame tangent_frame(const Vec3& n) {
  if (std::fabs(length(n) - 1.0) > 1e-6)
    throw MeshError("tangent frame needs a unit normal");

  // Any helper direction not parallel to n; the axis special case uses a
  // tolerance because ingested normals carry quantization noise (emitted
  // shaders keep an exact compare, where inputs are exact axis constants).
  Vec3 w = (std::fabs(n.y) < 1e-6 && std::fabs(n.z) < 1e-6) ? Vec3{0.0, 1.0, 0.0}
                                                            : Vec3{1.0, 0.0, 0.0};
  Vec3 v = normalized(cross(w, n));
  Vec3 u = cross(v, n);
  return {u, v};
}

VertexWarp warp_vertex(const Vec3& p, const Vec3& n, const Vec3& offset, const Mat3& jacobian) {
  VertexWarp out;
  out.position = p + offset;

  // An exactly zero Jacobian leaves the normal untouched; the cross-product
  // form would only reconstruct n up to rounding.
  bool zero_jacobian = true;
  for (const Vec3& c : jacobian.col)
    zero_jacobian = zero_jacobian && c.x == 0.0 && c.y == 0.0 && c.z == 0.0;
  if (zero_jacobian) {
    out.normal = n;
    return out;
  }

  TangentFrame frame = tangent_frame(n);
  Vec3 tu = frame.u + jacobian * frame.u;
  Vec3 tv = frame.v + jacobian * frame.v;
  Vec3 c = cross(tu, tv);
  double len = length(c);
  if (len < 1e-12) {
    out.normal = {0.0, 0.0, 0.0};
    out.degenerate = true;
  } else {
    out.normal = c / len;
  }
  return out;
}

namespace {

double max_edge_growth(const Mesh& before, const Mesh& after) {
  double worst = 0.0;
  for (std::size_t f = 0; f < before.faces.size(); ++f) {
    const auto& face = before.faces[f];
    for (int e = 0; e < 3; ++e) {
      std::uint32_t a = face[e], b = face[(e + 1) % 3];
      double orig = length(before.positions[a] - before.positions[b]);
      if (orig < 1e-12) continue;
      double warped = length(after.positions[a] - after.positions[b]);
      worst = std::max(worst, warped / orig);
    }
  }
  return worst;
}

}  // namespace

WarpMeshResult warp_mesh(const Mesh& mesh, const LinearProgram& program, const Env& uniforms,
                         const WarpMeshOptions& options) {
  validate_mesh(mesh);

  const std::size_t n = mesh.vertex_count();
  WarpMeshResult result;
  result.mesh = mesh;
  if (n == 0) return result;

  // Optional move to world space before the warp runs.
  std::vector<Vec3> positions = mesh.positions;
  std::vector<Vec3> normals = mesh.normals;
  if (options.model_matrix) {
    Mat3 normal_matrix;
    if (!inverse_transpose(options.model_matrix->linear_part(), normal_matrix))
      throw MeshError("model matrix is not invertible");
    for (std::size_t i = 0; i < n; ++i) {
      positions[i] = options.model_matrix->transform_point(positions[i]);
      if (length(normals[i]) < 1e-12) continue;  // already degenerate
      Vec3 tn = normal_matrix * normals[i];
      double len = length(tn);
      if (len < 1e-12) throw MeshError("model matrix collapsed a normal");
      normals[i] = tn / len;
    }
  }

  std::array<std::vector<double>, 3> px, nx;
  for (int c = 0; c < 3; ++c) {
    px[c].resize(n);
    nx[c].resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    px[0][i] = positions[i].x;
    px[1][i] = positions[i].y;
    px[2][i] = positions[i].z;
    nx[0][i] = normals[i].x;
    nx[1][i] = normals[i].y;
    nx[2][i] = normals[i].z;
  }

  BatchEvaluator evaluator(program, options.kernel);
  BatchInputs inputs;
  inputs.uniforms = uniforms;
  for (int c = 0; c < 3; ++c) {
    inputs.position[c] = px[c];
    inputs.normal[c] = nx[c];
  }
  BatchOutputs outputs;
  evaluator.run(inputs, n, outputs);

  if (!outputs.nonfinite_lanes.empty()) {
    // Re-run the first bad vertex through the scalar evaluator to surface
    // the precise statement that failed.
    Env env = uniforms;
    std::size_t lane = outputs.nonfinite_lanes.front();
    env.position = positions[lane];
    env.normal = normals[lane];
    eval_linear(program, env);
    throw EvalError("non-finite warp output", "vertex " + std::to_string(lane));
  }

  result.mesh.positions = positions;
  result.mesh.normals = normals;
  for (std::size_t i = 0; i < n; ++i) {
    // Normals already degenerate (from an earlier plane-collapsing warp)
    // stay zero; the position still moves.
    if (length(normals[i]) < 1e-12) {
      result.mesh.positions[i] = positions[i] + outputs.offset_at(i);
      result.mesh.normals[i] = {0.0, 0.0, 0.0};
      ++result.degenerate_normals;
      continue;
    }
    VertexWarp w = warp_vertex(positions[i], normals[i], outputs.offset_at(i),
                               outputs.jacobian_at(i));
    result.mesh.positions[i] = w.position;
    result.mesh.normals[i] = w.normal;
    if (w.degenerate) ++result.degenerate_normals;
  }

  Mesh before = mesh;
  before.positions = std::move(positions);
  result.max_edge_growth = max_edge_growth(before, result.mesh);
  return result;
}

}  // namespace warp
