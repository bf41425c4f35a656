#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace meshrft {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a * s; }
  friend constexpr bool operator==(Vec3 a, Vec3 b) = default;

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

using VertexIndex = std::uint32_t;
using Triangle = std::array<VertexIndex, 3>;

/// Indexed triangle mesh. Immutable once constructed; the constructor
/// enforces index range, non-repeated corners and finite positions.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Vec3> vertices, std::vector<Triangle> faces);

  const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  const std::vector<Triangle>& faces() const noexcept { return faces_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t face_count() const noexcept { return faces_.size(); }
  bool empty() const noexcept { return faces_.empty(); }

  Vec3 corner(std::size_t face, int k) const { return vertices_[faces_[face][k]]; }
  double face_area(std::size_t face) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> faces_;
};

using EdgeKey = std::pair<VertexIndex, VertexIndex>;

inline EdgeKey make_edge(VertexIndex a, VertexIndex b) {
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

struct EdgeTopology {
  /// Undirected edge (smaller index first) -> incident faces, ascending.
  std::map<EdgeKey, std::vector<std::uint32_t>> edges;
  std::size_t boundary_edge_count = 0;
  std::size_t total_edge_count = 0;
};

EdgeTopology build_edge_topology(const Mesh& mesh);

struct BoundingBox {
  Vec3 min;
  Vec3 max;

  Vec3 center() const { return (min + max) * 0.5; }
  double max_extent() const;
};

BoundingBox bounding_box(std::span<const Vec3> points);

/// Maps a bounding box into [0,1]^3 with one isotropic scale (the longest
/// extent), centering the box in the unit cube.
struct UnitCubeTransform {
  Vec3 center{};
  double scale = 1.0;

  static UnitCubeTransform fit(std::span<const Vec3> points);

  Vec3 apply(Vec3 p) const { return (p - center) * (1.0 / scale) + Vec3{0.5, 0.5, 0.5}; }
  Vec3 invert(Vec3 q) const { return (q - Vec3{0.5, 0.5, 0.5}) * scale + center; }
};

}  // namespace meshrft
