#include "meshrft/quad_merge.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "meshrft/errors.hpp"

namespace meshrft {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double angle_between_deg(Vec3 a, Vec3 b) {
  return std::atan2(norm(cross(a, b)), dot(a, b)) * kRadToDeg;
}

std::array<Vec3, 4> corners_of(const Quad& q, const Mesh& mesh) {
  const auto& v = mesh.vertices();
  return {v[q[0]], v[q[1]], v[q[2]], v[q[3]]};
}

struct Candidate {
  EdgeKey edge;
  std::uint32_t first;
  std::uint32_t second;
  Quad loop;
  double score;
};

// Merged loop for triangles f1 and f2 sharing edge {a, b}: with f1 = (u, v, w)
// cyclically and u->v the shared edge, the quad is (u, d, v, w) where d is
// the apex of f2.
std::optional<Quad> merged_loop(const Triangle& f1, const Triangle& f2, EdgeKey edge) {
  int k = 0;
  for (; k < 3; ++k) {
    const VertexIndex u = f1[k], v = f1[(k + 1) % 3];
    if (make_edge(u, v) == edge) break;
  }
  const VertexIndex u = f1[k], v = f1[(k + 1) % 3], w = f1[(k + 2) % 3];
  VertexIndex d = 0;
  bool found = false;
  for (VertexIndex c : f2) {
    if (c != u && c != v) {
      d = c;
      found = true;
    }
  }
  if (!found || d == w) return std::nullopt;
  return Quad{u, d, v, w};
}

bool strictly_convex(const std::array<Vec3, 4>& p) {
  // Newell normal as the best-fit plane normal
  Vec3 n{};
  for (int i = 0; i < 4; ++i) {
    const Vec3 a = p[i], b = p[(i + 1) % 4];
    n = n + Vec3{(a.y - b.y) * (a.z + b.z), (a.z - b.z) * (a.x + b.x), (a.x - b.x) * (a.y + b.y)};
  }
  if (!(norm(n) > 0.0)) return false;
  for (int i = 0; i < 4; ++i) {
    const Vec3 e0 = p[(i + 1) % 4] - p[i];
    const Vec3 e1 = p[(i + 2) % 4] - p[(i + 1) % 4];
    if (!(dot(cross(e0, e1), n) > 0.0)) return false;
  }
  return true;
}

double merge_score(const QuadGeometry& g) {
  double deviation = 0.0;
  for (double a : g.angles_deg) deviation += std::abs(a - 90.0);
  const double angle_quality = 1.0 - deviation / 360.0;
  return 0.5 * angle_quality + 0.5 / g.aspect_ratio;
}

}  // namespace

std::optional<QuadGeometry> try_quad_geometry(const std::array<Vec3, 4>& p) {
  QuadGeometry g;
  for (int i = 0; i < 4; ++i) {
    g.sides[i] = distance(p[i], p[(i + 1) % 4]);
    if (!(g.sides[i] > 0.0)) return std::nullopt;
  }
  for (int i = 0; i < 4; ++i) {
    const Vec3 prev = p[(i + 3) % 4] - p[i];
    const Vec3 next = p[(i + 1) % 4] - p[i];
    g.angles_deg[i] = angle_between_deg(prev, next);
  }
  const auto& l = g.sides;
  g.aspect_ratio = std::max(std::max(l[0], l[2]) / std::min(l[0], l[2]),
                            std::max(l[1], l[3]) / std::min(l[1], l[3]));
  const double longest = std::max({l[0], l[1], l[2], l[3]});
  g.edge_ratio = 0.25 * (l[0] / longest + l[1] / longest + l[2] / longest + l[3] / longest);
  return g;
}

QuadMesh merge_to_quads(const Mesh& mesh, double dihedral_tolerance_deg) {
  const EdgeTopology topo = build_edge_topology(mesh);
  const auto& faces = mesh.faces();
  const auto& verts = mesh.vertices();

  std::vector<Candidate> candidates;
  for (const auto& [edge, incident] : topo.edges) {
    if (incident.size() != 2) continue;
    const std::uint32_t f1 = incident[0], f2 = incident[1];
    const auto loop = merged_loop(faces[f1], faces[f2], edge);
    if (!loop) continue;
    const Quad& q = *loop;

    // (u, v, w) and (u, d, v) are both oriented along the quad loop
    const Vec3 n1 = cross(verts[q[2]] - verts[q[0]], verts[q[3]] - verts[q[0]]);
    const Vec3 n2 = cross(verts[q[1]] - verts[q[0]], verts[q[2]] - verts[q[0]]);
    if (!(norm(n1) > 0.0) || !(norm(n2) > 0.0)) continue;
    if (angle_between_deg(n1, n2) > dihedral_tolerance_deg) continue;

    const auto corners = corners_of(q, mesh);
    if (!strictly_convex(corners)) continue;
    const auto geom = try_quad_geometry(corners);
    if (!geom) continue;
    candidates.push_back({edge, f1, f2, q, merge_score(*geom)});
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.edge < b.edge;
  });

  QuadMesh qm;
  std::vector<bool> used(faces.size(), false);
  for (const Candidate& c : candidates) {
    if (used[c.first] || used[c.second]) continue;
    used[c.first] = used[c.second] = true;
    qm.quads.push_back(c.loop);
    qm.provenance.emplace_back(c.first, c.second);
  }
  for (std::uint32_t f = 0; f < faces.size(); ++f) {
    if (!used[f]) qm.residual_triangles.push_back(f);
  }
  return qm;
}

std::vector<std::vector<std::size_t>> quad_neighbors(const QuadMesh& qm) {
  std::map<EdgeKey, std::vector<std::size_t>> by_edge;
  for (std::size_t i = 0; i < qm.quads.size(); ++i) {
    const Quad& q = qm.quads[i];
    for (int k = 0; k < 4; ++k) by_edge[make_edge(q[k], q[(k + 1) % 4])].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out(qm.quads.size());
  for (const auto& [edge, owners] : by_edge) {
    for (std::size_t a : owners) {
      for (std::size_t b : owners) {
        if (a != b) out[a].push_back(b);
      }
    }
  }
  for (auto& n : out) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return out;
}

std::vector<QuadGeometry> compute_quad_geometry(const QuadMesh& qm, const Mesh& mesh) {
  std::vector<QuadGeometry> out;
  out.reserve(qm.quads.size());
  for (std::size_t i = 0; i < qm.quads.size(); ++i) {
    auto g = try_quad_geometry(corners_of(qm.quads[i], mesh));
    if (!g) throw DegenerateQuadError(i);
    out.push_back(std::move(*g));
  }
  auto neighbors = quad_neighbors(qm);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].neighbors = std::move(neighbors[i]);
  return out;
}

}  // namespace meshrft
