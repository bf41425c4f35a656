#include "meshrft/synthetic.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <set>

#include "meshrft/sampling.hpp"

namespace meshrft {

Mesh make_grid_mesh(std::size_t nx, std::size_t ny, double cell) {
  std::vector<Vec3> verts;
  std::vector<Triangle> faces;
  for (std::size_t j = 0; j <= ny; ++j) {
    for (std::size_t i = 0; i <= nx; ++i) verts.push_back({i * cell, j * cell, 0.0});
  }
  auto id = [&](std::size_t i, std::size_t j) { return static_cast<VertexIndex>(j * (nx + 1) + i); };
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(verts), std::move(faces));
}

Mesh make_box_mesh(std::size_t n, double size) {
  std::map<std::array<std::size_t, 3>, VertexIndex> index;
  std::vector<Vec3> verts;
  std::vector<Triangle> faces;
  auto vertex = [&](std::array<std::size_t, 3> g) {
    auto [it, inserted] = index.try_emplace(g, static_cast<VertexIndex>(verts.size()));
    if (inserted) {
      const double s = size / static_cast<double>(n);
      verts.push_back({g[0] * s, g[1] * s, g[2] * s});
    }
    return it->second;
  };
  const Vec3 center{size / 2, size / 2, size / 2};

  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    for (std::size_t side : {std::size_t{0}, n}) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          auto at = [&](std::size_t da, std::size_t db) {
            std::array<std::size_t, 3> g{};
            g[axis] = side;
            g[u] = a + da;
            g[v] = b + db;
            return vertex(g);
          };
          const VertexIndex p00 = at(0, 0), p10 = at(1, 0), p11 = at(1, 1), p01 = at(0, 1);
          for (Triangle t : {Triangle{p00, p10, p11}, Triangle{p00, p11, p01}}) {
            const Vec3 nrm = cross(verts[t[1]] - verts[t[0]], verts[t[2]] - verts[t[0]]);
            const Vec3 out = (verts[t[0]] + verts[t[1]] + verts[t[2]]) * (1.0 / 3.0) - center;
            if (dot(nrm, out) < 0.0) std::swap(t[1], t[2]);
            faces.push_back(t);
          }
        }
      }
    }
  }
  return Mesh(std::move(verts), std::move(faces));
}

Mesh degrade_mesh(const Mesh& mesh, const Degradation& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Triangle> faces = mesh.faces();
  std::vector<Vec3> verts = mesh.vertices();

  if (d.flip_fraction > 0.0) {
    const EdgeTopology topo = build_edge_topology(mesh);
    std::set<EdgeKey> existing;
    for (const auto& kv : topo.edges) existing.insert(kv.first);
    std::vector<bool> touched(faces.size(), false);
    for (const auto& [edge, incident] : topo.edges) {
      if (incident.size() != 2 || unit_uniform(rng) >= d.flip_fraction) continue;
      const std::uint32_t f1 = incident[0], f2 = incident[1];
      if (touched[f1] || touched[f2]) continue;
      int k = 0;
      while (make_edge(faces[f1][k], faces[f1][(k + 1) % 3]) != edge) ++k;
      const VertexIndex u = faces[f1][k], v = faces[f1][(k + 1) % 3], w = faces[f1][(k + 2) % 3];
      VertexIndex apex = u;
      for (VertexIndex c : faces[f2]) {
        if (c != u && c != v) apex = c;
      }
      if (apex == u || apex == w || existing.count(make_edge(apex, w))) continue;
      // quad (u, apex, v, w) re-split along apex-w
      faces[f1] = {u, apex, w};
      faces[f2] = {apex, v, w};
      existing.erase(edge);
      existing.insert(make_edge(apex, w));
      touched[f1] = touched[f2] = true;
    }
  }

  if (d.delete_fraction > 0.0) {
    std::vector<Triangle> kept;
    for (const Triangle& t : faces) {
      if (unit_uniform(rng) >= d.delete_fraction) kept.push_back(t);
    }
    if (kept.empty()) kept.push_back(faces.front());
    faces = std::move(kept);
  }

  if (d.jitter > 0.0) {
    const double amp = d.jitter * bounding_box(verts).max_extent();
    for (Vec3& p : verts) {
      p = p + Vec3{amp * (2.0 * unit_uniform(rng) - 1.0), amp * (2.0 * unit_uniform(rng) - 1.0),
                   amp * (2.0 * unit_uniform(rng) - 1.0)};
    }
  }
  return Mesh(std::move(verts), std::move(faces));
}

std::vector<Mesh> make_synthetic_candidates(const Mesh& seed_mesh, std::size_t count,
                                            std::uint64_t seed) {
  std::vector<Mesh> out;
  out.reserve(count);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    if (i == 0) {
      out.push_back(seed_mesh);
      continue;
    }
    const double severity = static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(count - 1, 1));
    Degradation d;
    d.jitter = 0.03 * severity * unit_uniform(rng);
    d.delete_fraction = 0.15 * severity * unit_uniform(rng);
    d.flip_fraction = 0.4 * severity * unit_uniform(rng);
    out.push_back(degrade_mesh(seed_mesh, d, rng()));
  }
  return out;
}

}  // namespace meshrft
