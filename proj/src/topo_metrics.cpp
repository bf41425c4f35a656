#include "meshrft/topo_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "meshrft/distance.hpp"
#include "meshrft/errors.hpp"
#include "meshrft/sampling.hpp"

namespace meshrft {

double boundary_edge_ratio(const EdgeTopology& topo) {
  if (topo.total_edge_count == 0) throw UndefinedMetricError("BER is undefined for an empty mesh");
  return static_cast<double>(topo.boundary_edge_count) /
         static_cast<double>(topo.total_edge_count);
}

double quad_ratio(const QuadMesh& qm) {
  const std::size_t total = qm.quads.size() + qm.residual_triangles.size();
  if (total == 0) throw UndefinedMetricError("quad ratio is undefined for an empty quad mesh");
  return static_cast<double>(qm.quads.size()) / static_cast<double>(total);
}

double angle_quality(std::span<const QuadGeometry> geoms) {
  if (geoms.empty()) return 0.0;
  double sum = 0.0;
  for (const QuadGeometry& g : geoms) {
    double deviation = 0.0;
    for (double a : g.angles_deg) deviation += std::abs(a - 90.0);
    sum += deviation / 360.0;
  }
  return 1.0 - sum / static_cast<double>(geoms.size());
}

double aspect_ratio_score(std::span<const QuadGeometry> geoms) {
  if (geoms.empty()) return 0.0;
  double r_sum = 0.0;
  double e_sum = 0.0;
  for (const QuadGeometry& g : geoms) {
    r_sum += g.aspect_ratio;
    e_sum += g.edge_ratio;
  }
  const double n = static_cast<double>(geoms.size());
  return 0.5 * (1.0 / (r_sum / n)) + 0.5 * (e_sum / n);
}

double adjacent_difference(std::span<const QuadGeometry> geoms, std::size_t i) {
  const QuadGeometry& g = geoms[i];
  if (g.neighbors.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t j : g.neighbors) sum += std::abs(g.aspect_ratio - geoms[j].aspect_ratio);
  return sum / static_cast<double>(g.neighbors.size());
}

double adjacent_consistency(std::span<const QuadGeometry> geoms) {
  if (geoms.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < geoms.size(); ++i) sum += 1.0 / (1.0 + adjacent_difference(geoms, i));
  return sum / static_cast<double>(geoms.size());
}

TopologyScore topology_score(const QuadMesh& qm, const Mesh& mesh) {
  const auto geoms = compute_quad_geometry(qm, mesh);
  TopologyScore out;
  out.sub = {quad_ratio(qm), angle_quality(geoms), aspect_ratio_score(geoms),
             adjacent_consistency(geoms)};
  double ts = 0.0;
  for (int i = 0; i < 4; ++i) ts += kTopologyWeights[i] * out.sub[i];
  // the weights sum to 1 only up to rounding
  out.ts = 100.0 * std::clamp(ts, 0.0, 1.0);
  return out;
}

TopologyScore topology_score(const Mesh& mesh, double dihedral_tolerance_deg) {
  if (mesh.empty()) throw UndefinedMetricError("topology score is undefined for an empty mesh");
  return topology_score(merge_to_quads(mesh, dihedral_tolerance_deg), mesh);
}

MetricReport evaluate_topology(const Mesh& mesh, const EvaluationOptions& opts) {
  if (mesh.empty()) throw UndefinedMetricError("cannot evaluate an empty mesh");
  MetricReport r;
  r.ber = boundary_edge_ratio(build_edge_topology(mesh));
  const TopologyScore ts = topology_score(mesh, opts.dihedral_tolerance_deg);
  r.ts = ts.ts;
  r.sub = ts.sub;
  r.seed = opts.seed;
  r.sample_count = opts.samples;
  return r;
}

MetricReport evaluate_candidate(const Mesh& mesh, const std::vector<Vec3>& reference,
                                const EvaluationOptions& opts) {
  MetricReport r = evaluate_topology(mesh, opts);
  const UnitCubeTransform frame = UnitCubeTransform::fit(reference);

  SampledSurface samples = sample_surface(mesh, opts.samples, opts.seed);
  for (Vec3& p : samples.points) p = frame.apply(p);
  std::vector<Vec3> ref;
  ref.reserve(reference.size());
  for (const Vec3& p : reference) ref.push_back(frame.apply(p));

  const PairDistances d = pair_distances(samples.points, ref);
  r.hd = d.hausdorff;
  r.cd = d.chamfer;
  r.hd_mesh_to_ref = d.a_to_b_max;
  r.hd_ref_to_mesh = d.b_to_a_max;
  return r;
}

}  // namespace meshrft
