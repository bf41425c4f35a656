#pragma once

#include <array>
#include <span>
#include <vector>

#include "meshrft/mesh.hpp"

namespace meshrft {

/// Exact nearest-neighbor queries over a fixed point set using a uniform
/// grid. Results equal brute force bit for bit: the same distance
/// expression is evaluated and the search only stops once no unvisited cell
/// can hold a closer point.
class NearestNeighborGrid {
 public:
  explicit NearestNeighborGrid(std::span<const Vec3> points);

  double nearest_distance(Vec3 query) const;

 private:
  std::span<const Vec3> points_;
  Vec3 origin_{};
  double cell_ = 1.0;
  std::array<long, 3> dims_{1, 1, 1};
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> order_;

  std::size_t flat(long i, long j, long k) const {
    return static_cast<std::size_t>((k * dims_[1] + j) * dims_[0] + i);
  }
};

struct DirectedDistances {
  double max = 0.0;
  double mean = 0.0;
};

/// Nearest-neighbor statistics from every point of `from` into `to`.
DirectedDistances directed_distances(std::span<const Vec3> from, std::span<const Vec3> to);

/// max of the two directed maxima.
double hausdorff(std::span<const Vec3> a, std::span<const Vec3> b);

/// 0.5 * (mean_a min_b |p - q| + mean_b min_a |p - q|), non-squared.
double chamfer(std::span<const Vec3> a, std::span<const Vec3> b);

struct PairDistances {
  double hausdorff = 0.0;
  double chamfer = 0.0;
  double a_to_b_max = 0.0;
  double b_to_a_max = 0.0;
};

/// Both statistics from one pair of directed passes.
PairDistances pair_distances(std::span<const Vec3> a, std::span<const Vec3> b);

}  // namespace meshrft
