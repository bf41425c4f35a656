#include "meshrft/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshrft/errors.hpp"

namespace meshrft {
namespace {

constexpr double kPointsPerCell = 2.0;
constexpr long kMaxCellsPerAxis = 256;
constexpr double kBoundSlack = 1e-9;

}  // namespace

NearestNeighborGrid::NearestNeighborGrid(std::span<const Vec3> points) : points_(points) {
  if (points.empty()) throw UndefinedMetricError("nearest-neighbor query against an empty set");
  const BoundingBox box = bounding_box(points);
  origin_ = box.min;

  const Vec3 ext = box.max - box.min;
  const double volume_extent = std::max(box.max_extent(), 1e-300);
  // cell edge so that a cube of the largest extent holds ~kPointsPerCell per cell
  const double cells_wanted = std::max(1.0, static_cast<double>(points.size()) / kPointsPerCell);
  cell_ = volume_extent / std::cbrt(cells_wanted);
  for (int a = 0; a < 3; ++a) {
    long d = static_cast<long>(std::floor(ext[a] / cell_)) + 1;
    dims_[a] = std::clamp(d, 1L, kMaxCellsPerAxis);
  }
  // widen cells if an axis was clamped so every point still lands inside
  for (int a = 0; a < 3; ++a) {
    cell_ = std::max(cell_, ext[a] / static_cast<double>(dims_[a]) * (1.0 + 1e-12));
  }

  const std::size_t ncells = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
  std::vector<std::size_t> cell_of(points.size());
  std::vector<std::size_t> counts(ncells + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    long c[3];
    for (int a = 0; a < 3; ++a) {
      c[a] = std::clamp(static_cast<long>((points[i][a] - origin_[a]) / cell_), 0L, dims_[a] - 1);
    }
    cell_of[i] = flat(c[0], c[1], c[2]);
    ++counts[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < ncells; ++c) counts[c + 1] += counts[c];
  cell_start_ = counts;
  order_.resize(points.size());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) order_[cursor[cell_of[i]]++] = i;
}

double NearestNeighborGrid::nearest_distance(Vec3 q) const {
  long c[3];
  for (int a = 0; a < 3; ++a) {
    const double rel = (q[a] - origin_[a]) / cell_;
    const double top = static_cast<double>(dims_[a] - 1);
    c[a] = rel < 0.0 ? 0L : static_cast<long>(std::min(rel, top));
  }

  double best = std::numeric_limits<double>::infinity();
  const long max_ring = std::max({dims_[0], dims_[1], dims_[2]});
  for (long r = 0; r <= max_ring; ++r) {
    long lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(c[a] - r, 0L);
      hi[a] = std::min(c[a] + r, dims_[a] - 1);
    }
    for (long k = lo[2]; k <= hi[2]; ++k) {
      for (long j = lo[1]; j <= hi[1]; ++j) {
        for (long i = lo[0]; i <= hi[0]; ++i) {
          // only the shell of Chebyshev radius r is new
          if (std::max({std::abs(i - c[0]), std::abs(j - c[1]), std::abs(k - c[2])}) != r) continue;
          const std::size_t cell = flat(i, j, k);
          for (std::size_t s = cell_start_[cell]; s < cell_start_[cell + 1]; ++s) {
            best = std::min(best, distance(q, points_[order_[s]]));
          }
        }
      }
    }

    // Distance from q to the nearest face of the searched box that still has
    // unsearched cells beyond it.
    double bound = std::numeric_limits<double>::infinity();
    bool complete = true;
    for (int a = 0; a < 3; ++a) {
      if (c[a] - r > 0) {
        complete = false;
        bound = std::min(bound, q[a] - (origin_[a] + static_cast<double>(c[a] - r) * cell_));
      }
      if (c[a] + r < dims_[a] - 1) {
        complete = false;
        bound = std::min(bound, origin_[a] + static_cast<double>(c[a] + r + 1) * cell_ - q[a]);
      }
    }
    // slack absorbs rounding in the cell assignment of border points
    if (complete || best <= bound - kBoundSlack * cell_) break;
  }
  return best;
}

DirectedDistances directed_distances(std::span<const Vec3> from, std::span<const Vec3> to) {
  if (from.empty() || to.empty()) throw UndefinedMetricError("distance between empty point sets");
  const NearestNeighborGrid grid(to);
  DirectedDistances out;
  double sum = 0.0;
  for (const Vec3& p : from) {
    const double d = grid.nearest_distance(p);
    out.max = std::max(out.max, d);
    sum += d;
  }
  out.mean = sum / static_cast<double>(from.size());
  return out;
}

PairDistances pair_distances(std::span<const Vec3> a, std::span<const Vec3> b) {
  const DirectedDistances ab = directed_distances(a, b);
  const DirectedDistances ba = directed_distances(b, a);
  return {std::max(ab.max, ba.max), 0.5 * (ab.mean + ba.mean), ab.max, ba.max};
}

double hausdorff(std::span<const Vec3> a, std::span<const Vec3> b) {
  return pair_distances(a, b).hausdorff;
}

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  return pair_distances(a, b).chamfer;
}

}  // namespace meshrft
