#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "meshrft/mesh.hpp"
#include "meshrft/quad_merge.hpp"

namespace meshrft {

/// Sub-metric weights of the topology score: quad ratio, angle quality,
/// aspect ratio, adjacent consistency.
inline constexpr std::array<double, 4> kTopologyWeights = {0.4, 0.2, 0.3, 0.1};

/// BER above this value is flagged in reports. Never used for ranking.
inline constexpr double kHighBoundaryEdgeRatio = 0.002;

/// E_boundary / E_total. Throws UndefinedMetricError on an edgeless topology.
double boundary_edge_ratio(const EdgeTopology& topo);

/// s1 = |quads| / (|quads| + |residual triangles|).
double quad_ratio(const QuadMesh& qm);

// s2..s4 are means over quads. An empty list yields 0 so candidates without
// any quad still order totally.
double angle_quality(std::span<const QuadGeometry> geoms);
double aspect_ratio_score(std::span<const QuadGeometry> geoms);

/// Neighbor indices in each geometry refer to positions in `geoms`.
/// A quad without neighbors contributes d_q = 0.
double adjacent_consistency(std::span<const QuadGeometry> geoms);

/// Mean |r_q - r_n| over the neighbors of quad i; 0 when isolated.
double adjacent_difference(std::span<const QuadGeometry> geoms, std::size_t i);

struct TopologyScore {
  double ts = 0.0;  ///< 0..100
  std::array<double, 4> sub{};
};

TopologyScore topology_score(const Mesh& mesh,
                             double dihedral_tolerance_deg = kDefaultDihedralToleranceDeg);
TopologyScore topology_score(const QuadMesh& qm, const Mesh& mesh);

struct MetricReport {
  double ber = 0.0;
  double ts = 0.0;
  std::array<double, 4> sub{};
  /// Distances are present only when evaluated against a reference cloud.
  std::optional<double> hd;
  std::optional<double> cd;
  std::optional<double> hd_mesh_to_ref;
  std::optional<double> hd_ref_to_mesh;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;

  bool ber_high() const noexcept { return ber > kHighBoundaryEdgeRatio; }
};

struct EvaluationOptions {
  std::size_t samples = 16384;
  std::uint64_t seed = 0;
  double dihedral_tolerance_deg = kDefaultDihedralToleranceDeg;
};

/// BER and TS only.
MetricReport evaluate_topology(const Mesh& mesh, const EvaluationOptions& opts = {});

/// Full report: the mesh surface is sampled with `opts.seed` and compared to
/// `reference` after both are mapped by the reference's unit-cube transform.
MetricReport evaluate_candidate(const Mesh& mesh, const std::vector<Vec3>& reference,
                                const EvaluationOptions& opts = {});

}  // namespace meshrft
