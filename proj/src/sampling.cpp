#include "meshrft/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "meshrft/errors.hpp"

namespace meshrft {

SampledSurface sample_surface(const Mesh& mesh, std::size_t n, std::uint64_t seed) {
  std::vector<double> cumulative;
  cumulative.reserve(mesh.face_count());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    total += mesh.face_area(f);
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw DegenerateGeometryError("mesh has zero surface area");

  std::mt19937_64 rng(seed);
  SampledSurface out;
  out.seed = seed;
  out.points.reserve(n);
  out.faces.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = unit_uniform(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    // zero-area faces can never be picked; an exact hit on `total` clamps
    if (it == cumulative.end()) --it;
    const auto face = static_cast<std::uint32_t>(it - cumulative.begin());

    const double r1 = std::sqrt(unit_uniform(rng));
    const double r2 = unit_uniform(rng);
    const double wa = 1.0 - r1;
    const double wb = r1 * (1.0 - r2);
    const double wc = r1 * r2;
    out.points.push_back(mesh.corner(face, 0) * wa + mesh.corner(face, 1) * wb +
                         mesh.corner(face, 2) * wc);
    out.faces.push_back(face);
  }
  return out;
}

SampledSurface point_cloud(std::vector<Vec3> points) {
  SampledSurface s;
  s.points = std::move(points);
  return s;
}

}  // namespace meshrft
