#pragma once

#include <cstdint>
#include <string>

#include "warp/mesh.hpp"

namespace warp {

/// Lat-long sphere with rings*segments + 2 vertices and smooth normals.
Mesh make_uv_sphere(int rings, int segments, double radius = 1.0);

/// Axis-aligned unit cube, 24 vertices (4 per face, face normals).
Mesh make_cube(double half_extent = 0.5);

/// Offset source made of stacked random sine terms, grown until the lowered
/// graph reaches at least `target_nodes` nodes. Deterministic per seed.
std::string make_stacked_sine_source(std::size_t target_nodes, std::uint64_t seed);

}  // namespace warp
