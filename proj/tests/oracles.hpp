#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "meshrft/mesh.hpp"

namespace meshrft::testing {

/// Independent edge enumeration: collect every face side as a sorted pair and
/// count multiplicities with a plain multiset. Returns (edges, boundary edges).
inline std::pair<std::size_t, std::size_t> enumerate_edges(const Mesh& m) {
  std::multiset<std::pair<VertexIndex, VertexIndex>> sides;
  for (const auto& f : m.faces()) {
    for (int k = 0; k < 3; ++k) {
      VertexIndex a = f[k], b = f[(k + 1) % 3];
      sides.insert({std::min(a, b), std::max(a, b)});
    }
  }
  std::set<std::pair<VertexIndex, VertexIndex>> unique(sides.begin(), sides.end());
  std::size_t boundary = 0;
  for (const auto& e : unique) boundary += sides.count(e) == 1;
  return {unique.size(), boundary};
}

inline double enumerate_ber(const Mesh& m) {
  const auto [edges, boundary] = enumerate_edges(m);
  return static_cast<double>(boundary) / static_cast<double>(edges);
}

struct BruteDistances {
  double hd;
  double cd;
};

/// O(n^2) Hausdorff and Chamfer, evaluated independently of the grid accelerator.
inline BruteDistances brute_force(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto directed = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    double mx = 0.0, sum = 0.0;
    for (const Vec3& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& q : to) best = std::min(best, distance(p, q));
      mx = std::max(mx, best);
      sum += best;
    }
    return std::pair{mx, sum / static_cast<double>(from.size())};
  };
  auto [ab_max, ab_mean] = directed(a, b);
  auto [ba_max, ba_mean] = directed(b, a);
  return {std::max(ab_max, ba_max), 0.5 * (ab_mean + ba_mean)};
}

inline Mesh append(const Mesh& a, const Mesh& b) {
  std::vector<Vec3> v = a.vertices();
  std::vector<Triangle> f = a.faces();
  const auto off = static_cast<VertexIndex>(v.size());
  v.insert(v.end(), b.vertices().begin(), b.vertices().end());
  for (Triangle t : b.faces()) f.push_back({t[0] + off, t[1] + off, t[2] + off});
  return Mesh(std::move(v), std::move(f));
}

inline Mesh translated(const Mesh& m, Vec3 d) {
  std::vector<Vec3> v = m.vertices();
  for (auto& p : v) p = p + d;
  return Mesh(std::move(v), m.faces());
}

}  // namespace meshrft::testing
