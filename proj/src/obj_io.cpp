#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "warp/mesh.hpp"

namespace warp {

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& message) {
  throw MeshError("line " + std::to_string(line_no) + ": " + message);
}

double parse_double(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    fail_line(line_no, "malformed number '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

struct FaceCorner {
  int position = 0;  // 1-based; negative = relative
  int texcoord = 0;  // 0 = none
  int normal = 0;    // 0 = none
};

FaceCorner parse_corner(std::string_view text, std::size_t line_no) {
  FaceCorner corner;
  std::array<std::string_view, 3> parts{};
  std::size_t count = 0, start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '/') {
      if (count >= 3) fail_line(line_no, "too many '/' in face corner");
      parts[count++] = text.substr(start, i - start);
      start = i + 1;
    }
  }
  auto to_index = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0)
      fail_line(line_no, "malformed face index '" + std::string(s) + "'");
    return v;
  };
  if (parts[0].empty()) fail_line(line_no, "face corner has no position index");
  corner.position = to_index(parts[0]);
  if (count >= 2 && !parts[1].empty()) corner.texcoord = to_index(parts[1]);
  if (count >= 3 && !parts[2].empty()) corner.normal = to_index(parts[2]);
  return corner;
}

}  // namespace

Mesh parse_obj(std::string_view text) {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<std::string> texcoords;
  struct Corner {
    std::uint32_t p, n;
    std::int32_t t;
  };
  std::vector<std::array<Corner, 3>> tris;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_normals = false;

  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    auto fields = split_ws(line);
    if (fields.empty()) {
      if (pos > text.size()) break;
      continue;
    }

    std::string_view tag = fields[0];
    if (tag == "v") {
      if (fields.size() < 4) fail_line(line_no, "'v' needs 3 coordinates");
      positions.push_back({parse_double(fields[1], line_no), parse_double(fields[2], line_no),
                           parse_double(fields[3], line_no)});
    } else if (tag == "vn") {
      if (fields.size() != 4) fail_line(line_no, "'vn' needs 3 coordinates");
      saw_normals = true;
      normals.push_back({parse_double(fields[1], line_no), parse_double(fields[2], line_no),
                         parse_double(fields[3], line_no)});
    } else if (tag == "vt") {
      std::string payload;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (i > 1) payload += ' ';
        payload += std::string(fields[i]);
      }
      texcoords.push_back(std::move(payload));
    } else if (tag == "f") {
      if (fields.size() < 4) fail_line(line_no, "'f' needs at least 3 corners");
      std::vector<Corner> corners;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        FaceCorner c = parse_corner(fields[i], line_no);
        auto resolve = [&](int idx, std::size_t limit, const char* what) -> std::uint32_t {
          long v = idx > 0 ? idx : static_cast<long>(limit) + idx + 1;
          if (v < 1 || v > static_cast<long>(limit))
            fail_line(line_no, std::string(what) + " index out of range");
          return static_cast<std::uint32_t>(v - 1);
        };
        if (c.normal == 0)
          fail_line(line_no, saw_normals || !normals.empty()
                                 ? "face corner is missing its normal index"
                                 : "mesh has no baked normals");
        Corner out;
        out.p = resolve(c.position, positions.size(), "position");
        out.n = resolve(c.normal, normals.size(), "normal");
        out.t = c.texcoord == 0
                    ? -1
                    : static_cast<std::int32_t>(resolve(c.texcoord, texcoords.size(), "texcoord"));
        corners.push_back(out);
      }
      // Fan triangulation for quads and larger polygons.
      for (std::size_t i = 1; i + 1 < corners.size(); ++i)
        tris.push_back({corners[0], corners[i], corners[i + 1]});
    }
    // Other records (o, g, s, mtllib, usemtl, ...) are ignored.
    if (end == text.size()) break;
  }

  if (normals.empty() && !tris.empty()) throw MeshError("mesh has no baked normals");

  // Re-index so positions and normals are parallel per vertex.
  Mesh mesh;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::int32_t>, std::uint32_t> remap;
  bool any_texcoord = false;
  for (const auto& tri : tris) {
    std::array<std::uint32_t, 3> face{};
    std::array<std::int32_t, 3> face_t{-1, -1, -1};
    for (int k = 0; k < 3; ++k) {
      auto key = std::make_tuple(tri[k].p, tri[k].n, tri[k].t);
      auto it = remap.find(key);
      std::uint32_t id;
      if (it != remap.end()) {
        id = it->second;
      } else {
        id = static_cast<std::uint32_t>(mesh.positions.size());
        mesh.positions.push_back(positions[tri[k].p]);
        Vec3 nrm = normals[tri[k].n];
        double len = length(nrm);
        if (len < 1e-12) throw MeshError("zero-length normal in mesh");
        if (std::fabs(len - 1.0) > 1e-4) nrm = nrm / len;
        mesh.normals.push_back(nrm);
        remap.emplace(key, id);
      }
      face[k] = id;
      face_t[k] = tri[k].t;
      if (tri[k].t >= 0) any_texcoord = true;
    }
    mesh.faces.push_back(face);
    mesh.face_texcoords.push_back(face_t);
  }

  if (any_texcoord)
    mesh.texcoords = std::move(texcoords);
  else
    mesh.face_texcoords.clear();

  validate_mesh(mesh);
  return mesh;
}

Mesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_obj(buffer.str());
  } catch (const MeshError& e) {
    throw MeshError(path.string() + ": " + e.what());
  }
}

namespace {

void print_float9(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

}  // namespace

std::string obj_text(const Mesh& mesh) {
  validate_mesh(mesh);
  std::string out;
  for (const Vec3& p : mesh.positions) {
    out += "v ";
    print_float9(out, p.x);
    out += ' ';
    print_float9(out, p.y);
    out += ' ';
    print_float9(out, p.z);
    out += '\n';
  }
  for (const std::string& t : mesh.texcoords) {
    out += "vt ";
    out += t;
    out += '\n';
  }
  for (const Vec3& n : mesh.normals) {
    out += "vn ";
    print_float9(out, n.x);
    out += ' ';
    print_float9(out, n.y);
    out += ' ';
    print_float9(out, n.z);
    out += '\n';
  }
  bool has_t = !mesh.texcoords.empty() && !mesh.face_texcoords.empty();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    out += 'f';
    for (int k = 0; k < 3; ++k) {
      std::uint32_t idx = mesh.faces[f][k] + 1;
      out += ' ';
      out += std::to_string(idx);
      out += '/';
      if (has_t && mesh.face_texcoords[f][k] >= 0)
        out += std::to_string(mesh.face_texcoords[f][k] + 1);
      out += '/';
      out += std::to_string(idx);
    }
    out += '\n';
  }
  return out;
}

void write_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << obj_text(mesh);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace warp
