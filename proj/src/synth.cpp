#include "warp/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "warp/dsl.hpp"

namespace warp {

Mesh make_uv_sphere(int rings, int segments, double radius) {
  if (rings < 1 || segments < 3) throw MeshError("sphere needs rings >= 1, segments >= 3");

  Mesh mesh;
  const double pi = std::numbers::pi;

  mesh.positions.push_back({0.0, radius, 0.0});
  mesh.normals.push_back({0.0, 1.0, 0.0});
  for (int i = 1; i <= rings; ++i) {
    double theta = pi * i / (rings + 1);
    for (int j = 0; j < segments; ++j) {
      double phi = 2.0 * pi * j / segments;
      Vec3 n{std::sin(theta) * std::cos(phi), std::cos(theta), std::sin(theta) * std::sin(phi)};
      mesh.positions.push_back(n * radius);
      mesh.normals.push_back(n);
    }
  }
  mesh.positions.push_back({0.0, -radius, 0.0});
  mesh.normals.push_back({0.0, -1.0, 0.0});

  auto ring_vertex = [&](int ring, int j) {
    return static_cast<std::uint32_t>(1 + ring * segments + (j % segments));
  };
  const std::uint32_t top = 0;
  const std::uint32_t bottom = static_cast<std::uint32_t>(mesh.positions.size() - 1);

  for (int j = 0; j < segments; ++j)
    mesh.faces.push_back({top, ring_vertex(0, j + 1), ring_vertex(0, j)});
  for (int i = 0; i + 1 < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      std::uint32_t a = ring_vertex(i, j), b = ring_vertex(i, j + 1);
      std::uint32_t c = ring_vertex(i + 1, j), d = ring_vertex(i + 1, j + 1);
      mesh.faces.push_back({a, b, d});
      mesh.faces.push_back({a, d, c});
    }
  }
  for (int j = 0; j < segments; ++j)
    mesh.faces.push_back({bottom, ring_vertex(rings - 1, j), ring_vertex(rings - 1, j + 1)});

  return mesh;
}

Mesh make_cube(double h) {
  Mesh mesh;
  struct Face {
    Vec3 normal, u, v;
  };
  const Face faces[6] = {
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},   {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},
      {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}},   {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
      {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},   {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}},
  };
  for (const Face& f : faces) {
    std::uint32_t base = static_cast<std::uint32_t>(mesh.positions.size());
    Vec3 center = f.normal * h;
    mesh.positions.push_back(center - f.u * h - f.v * h);
    mesh.positions.push_back(center + f.u * h - f.v * h);
    mesh.positions.push_back(center + f.u * h + f.v * h);
    mesh.positions.push_back(center - f.u * h + f.v * h);
    for (int k = 0; k < 4; ++k) mesh.normals.push_back(f.normal);
    mesh.faces.push_back({base, base + 1, base + 2});
    mesh.faces.push_back({base, base + 2, base + 3});
  }
  return mesh;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string make_stacked_sine_source(std::size_t target_nodes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.02, 0.25);
  std::uniform_real_distribution<double> freq(-2.0, 2.0);
  std::uniform_real_distribution<double> tcoef(0.0002, 0.004);
  std::uniform_real_distribution<double> phase(0.0, 6.2831);

  std::array<std::string, 3> axes{"0.0", "0.0", "0.0"};

  auto assemble = [&]() {
    return "vec3(" + axes[0] + ", " + axes[1] + ", " + axes[2] + ")";
  };

  int axis = 0;
  std::string source = assemble();
  while (compile_warp(source).graph.size() < target_nodes) {
    std::string term = fmt(amp(rng)) + " * sin(" + fmt(freq(rng)) + " * position.x + " +
                       fmt(freq(rng)) + " * position.y + " + fmt(freq(rng)) + " * position.z + " +
                       fmt(tcoef(rng)) + " * millis + " + fmt(phase(rng)) + ")";
    axes[axis] += " + " + term;
    axis = (axis + 1) % 3;
    source = assemble();
  }
  return source;
}

}  // namespace warp
