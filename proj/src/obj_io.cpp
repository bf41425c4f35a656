#include "meshrft/obj_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string_view>

#include "meshrft/errors.hpp"
#include "meshrft/quad_merge.hpp"

namespace meshrft {
namespace {

constexpr std::array<std::string_view, 12> kFreeFormKeywords = {
    "cstype", "deg", "bmat", "step", "curv", "curv2", "surf", "parm", "trim", "hole", "scrv", "sp"};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view tok, double& value) {
  // from_chars for double is available in libstdc++ 11
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  return ec == std::errc() && ptr == end;
}

struct ObjRecords {
  std::vector<Vec3> vertices;
  std::vector<Triangle> faces;
};

ObjRecords read_records(std::istream& in, const std::string& source, bool want_faces) {
  ObjRecords rec;
  std::string line;
  std::size_t lineno = 0;
  struct PendingFace {
    std::vector<long long> corners;
    std::size_t line;
  };
  std::vector<PendingFace> pending;

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto toks = split_ws(view);
    if (toks.empty()) continue;
    const std::string_view key = toks[0];

    if (key == "v") {
      if (toks.size() < 4 || toks.size() > 5) {
        throw ParseError(source, lineno, "vertex record needs 3 coordinates");
      }
      Vec3 p;
      if (!parse_double(toks[1], p.x) || !parse_double(toks[2], p.y) ||
          !parse_double(toks[3], p.z)) {
        throw ParseError(source, lineno, "invalid vertex coordinate");
      }
      rec.vertices.push_back(p);
    } else if (key == "f") {
      if (!want_faces) continue;
      if (toks.size() < 4) {
        throw ParseError(source, lineno, "face record needs at least 3 vertices");
      }
      PendingFace face{{}, lineno};
      for (std::size_t i = 1; i < toks.size(); ++i) {
        std::string_view idx = toks[i].substr(0, toks[i].find('/'));
        long long value = 0;
        auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), value);
        if (ec != std::errc() || ptr != idx.data() + idx.size() || value == 0) {
          throw ParseError(source, lineno, "invalid face index '" + std::string(toks[i]) + "'");
        }
        // negative indices are relative to the vertices read so far
        if (value < 0) value += static_cast<long long>(rec.vertices.size()) + 1;
        if (value <= 0) throw ParseError(source, lineno, "relative face index out of range");
        face.corners.push_back(value - 1);
      }
      pending.push_back(std::move(face));
    } else {
      for (auto ff : kFreeFormKeywords) {
        if (key == ff) {
          throw UnsupportedFeatureError(source + ":" + std::to_string(lineno) +
                                        ": free-form geometry ('" + std::string(key) +
                                        "') is not supported");
        }
      }
      // vn, vt, vp, o, g, s, l, p, usemtl, mtllib and friends are ignored
    }
  }

  for (const auto& face : pending) {
    for (long long c : face.corners) {
      if (c >= static_cast<long long>(rec.vertices.size())) {
        throw ParseError(source, face.line, "face index " + std::to_string(c + 1) +
                                                " exceeds vertex count " +
                                                std::to_string(rec.vertices.size()));
      }
    }
    for (std::size_t k = 1; k + 1 < face.corners.size(); ++k) {
      Triangle t{static_cast<VertexIndex>(face.corners[0]), static_cast<VertexIndex>(face.corners[k]),
                 static_cast<VertexIndex>(face.corners[k + 1])};
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
        throw ParseError(source, face.line, "face repeats a vertex index");
      }
      rec.faces.push_back(t);
    }
  }
  return rec;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

Mesh parse_obj(std::istream& in, const std::string& source_name) {
  ObjRecords rec = read_records(in, source_name, true);
  return Mesh(std::move(rec.vertices), std::move(rec.faces));
}

Mesh load_obj(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_obj(in, path.string());
}

std::vector<Vec3> load_obj_vertices(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_records(in, path.string(), false).vertices;
}

void write_obj(std::ostream& out, const Mesh& mesh) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const Vec3& v : mesh.vertices()) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const Triangle& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

void save_obj(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_obj(out, mesh);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void write_quad_obj(std::ostream& out, const QuadMesh& quads, const Mesh& mesh) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const Vec3& v : mesh.vertices()) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const Quad& q : quads.quads) {
    out << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
  }
  for (std::uint32_t f : quads.residual_triangles) {
    const Triangle& t = mesh.faces()[f];
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

}  // namespace meshrft
