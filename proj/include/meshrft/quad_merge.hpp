#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "meshrft/mesh.hpp"

namespace meshrft {

using Quad = std::array<VertexIndex, 4>;

/// Quad-dominant mesh derived from a triangle mesh. Every source triangle
/// is in exactly one quad (via provenance) or in residual_triangles.
struct QuadMesh {
  std::vector<Quad> quads;
  /// Source triangle pair of each quad, same indexing as `quads`.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> provenance;
  /// Unmerged source triangles, ascending.
  std::vector<std::uint32_t> residual_triangles;

  std::size_t face_count() const noexcept { return quads.size() + residual_triangles.size(); }
};

inline constexpr double kDefaultDihedralToleranceDeg = 30.0;

/// Greedy best-score pairing of edge-adjacent triangles.
///
/// Candidates are interior edges shared by exactly two triangles. A candidate
/// is rejected when the two triangles bend by more than the dihedral tolerance
/// or when the merged loop is not strictly convex in its best-fit plane.
/// Survivors are scored 0.5 * angle quality + 0.5 / aspect ratio and accepted
/// in descending score order (ties: smaller shared edge first), each triangle
/// used at most once.
QuadMesh merge_to_quads(const Mesh& mesh,
                        double dihedral_tolerance_deg = kDefaultDihedralToleranceDeg);

struct QuadGeometry {
  std::array<double, 4> angles_deg{};  ///< interior angle at corner i
  std::array<double, 4> sides{};       ///< length of edge corner i -> corner i+1
  double aspect_ratio = 1.0;           ///< r_q, pairs of opposite sides
  double edge_ratio = 1.0;             ///< e_q, mean side over max side
  std::vector<std::size_t> neighbors;  ///< quads sharing a full edge
};

/// Geometry of one quad loop, or nullopt when a side has zero length.
std::optional<QuadGeometry> try_quad_geometry(const std::array<Vec3, 4>& corners);

/// Per-quad geometry with neighbor sets; throws DegenerateQuadError naming
/// the first quad with a zero-length side.
std::vector<QuadGeometry> compute_quad_geometry(const QuadMesh& qm, const Mesh& mesh);

/// Quads sharing at least one full edge, per quad, ascending.
std::vector<std::vector<std::size_t>> quad_neighbors(const QuadMesh& qm);

}  // namespace meshrft
