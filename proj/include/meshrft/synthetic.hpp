#pragma once

#include <cstdint>
#include <vector>

#include "meshrft/mesh.hpp"

namespace meshrft {

/// nx * ny unit squares in the z = 0 plane, each split along the same
/// diagonal into two triangles.
Mesh make_grid_mesh(std::size_t nx, std::size_t ny, double cell = 1.0);

/// Closed axis-aligned cube of side `size`, each face an n * n grid of
/// squares split into triangles. n = 1 gives the 12-triangle cube.
Mesh make_box_mesh(std::size_t n, double size = 1.0);

struct Degradation {
  double jitter = 0.0;           ///< vertex noise amplitude, relative to bbox extent
  double delete_fraction = 0.0;  ///< fraction of faces removed
  double flip_fraction = 0.0;    ///< fraction of interior edges flipped
};

/// Applies random edge flips, face deletions and vertex jitter, in that order.
Mesh degrade_mesh(const Mesh& mesh, const Degradation& d, std::uint64_t seed);

/// `count` candidates of increasing severity derived from `seed_mesh`; the
/// first is the undamaged mesh.
std::vector<Mesh> make_synthetic_candidates(const Mesh& seed_mesh, std::size_t count,
                                            std::uint64_t seed);

}  // namespace meshrft
