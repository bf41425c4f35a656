#include "meshrft/mesh.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "meshrft/errors.hpp"

namespace meshrft {

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<Triangle> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec3& v = vertices_[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      throw InputError("vertex " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Triangle& t = faces_[f];
    for (VertexIndex idx : t) {
      if (idx >= vertices_.size()) {
        throw InputError("face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                         " but the mesh has " + std::to_string(vertices_.size()) + " vertices");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw InputError("face " + std::to_string(f) + " repeats a vertex index");
    }
  }
}

double Mesh::face_area(std::size_t face) const {
  const Vec3 a = corner(face, 0);
  return 0.5 * norm(cross(corner(face, 1) - a, corner(face, 2) - a));
}

EdgeTopology build_edge_topology(const Mesh& mesh) {
  EdgeTopology topo;
  const auto& faces = mesh.faces();
  for (std::uint32_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      topo.edges[make_edge(faces[f][k], faces[f][(k + 1) % 3])].push_back(f);
    }
  }
  topo.total_edge_count = topo.edges.size();
  topo.boundary_edge_count = static_cast<std::size_t>(
      std::count_if(topo.edges.begin(), topo.edges.end(),
                    [](const auto& kv) { return kv.second.size() == 1; }));
  return topo;
}

double BoundingBox::max_extent() const {
  return std::max({max.x - min.x, max.y - min.y, max.z - min.z});
}

BoundingBox bounding_box(std::span<const Vec3> points) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox box{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const Vec3& p : points) {
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
  }
  return box;
}

UnitCubeTransform UnitCubeTransform::fit(std::span<const Vec3> points) {
  if (points.empty()) {
    throw DegenerateGeometryError("cannot normalize an empty point set");
  }
  const BoundingBox box = bounding_box(points);
  const double extent = box.max_extent();
  if (!(extent > 0.0)) {
    throw DegenerateGeometryError("bounding box has zero extent (all points coincide)");
  }
  return {box.center(), extent};
}

}  // namespace meshrft
