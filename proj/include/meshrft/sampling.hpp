#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "meshrft/mesh.hpp"

namespace meshrft {

inline constexpr std::size_t kDefaultSampleCount = 16384;

struct SampledSurface {
  std::vector<Vec3> points;
  std::uint64_t seed = 0;
  /// Source face of each point; empty when the set came from a point cloud.
  std::vector<std::uint32_t> faces;
};

/// Uniform double in [0, 1) from the top 53 bits. Kept independent of
/// std::uniform_real_distribution so sample sets are reproducible across
/// standard library implementations.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Area-weighted uniform samples; throws DegenerateGeometryError when the
/// mesh has no area.
SampledSurface sample_surface(const Mesh& mesh, std::size_t n = kDefaultSampleCount,
                              std::uint64_t seed = 0);

SampledSurface point_cloud(std::vector<Vec3> points);

}  // namespace meshrft
