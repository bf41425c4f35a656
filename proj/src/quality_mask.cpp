#include "meshrft/quality_mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "meshrft/errors.hpp"

namespace meshrft {

double quad_quality(const QuadGeometry& geom, std::span<const QuadGeometry> neighborhood,
                    const QualityWeights& weights) {
  double deviation = 0.0;
  for (double a : geom.angles_deg) deviation += std::abs(a - 90.0);
  const double angle = 1.0 - deviation / 360.0;
  const double aspect = 0.5 / geom.aspect_ratio + 0.5 * geom.edge_ratio;
  double diff = 0.0;
  if (!neighborhood.empty()) {
    for (const QuadGeometry& n : neighborhood) diff += std::abs(geom.aspect_ratio - n.aspect_ratio);
    diff /= static_cast<double>(neighborhood.size());
  }
  const double adjacency = 1.0 / (1.0 + diff);
  return weights.angle * angle + weights.aspect * aspect + weights.adjacency * adjacency;
}

std::size_t FaceLabels::good_count() const {
  return static_cast<std::size_t>(std::count(good.begin(), good.end(), std::uint8_t{1}));
}

FaceLabels label_faces(const Mesh& mesh, const QuadMesh& qm, double tau,
                       const QualityWeights& weights) {
  const auto& verts = mesh.vertices();
  std::vector<std::optional<QuadGeometry>> geoms;
  geoms.reserve(qm.quads.size());
  for (const Quad& q : qm.quads) {
    geoms.push_back(try_quad_geometry({verts[q[0]], verts[q[1]], verts[q[2]], verts[q[3]]}));
  }
  const auto neighbors = quad_neighbors(qm);

  FaceLabels labels;
  labels.tau = tau;
  labels.good.assign(mesh.face_count(), 0);
  labels.quad_scores.assign(qm.quads.size(), 0.0);
  for (std::size_t i = 0; i < qm.quads.size(); ++i) {
    if (!geoms[i]) continue;
    std::vector<QuadGeometry> hood;
    for (std::size_t j : neighbors[i]) {
      if (geoms[j]) hood.push_back(*geoms[j]);
    }
    labels.quad_scores[i] = quad_quality(*geoms[i], hood, weights);
    if (labels.quad_scores[i] >= tau) {
      labels.good[qm.provenance[i].first] = 1;
      labels.good[qm.provenance[i].second] = 1;
    }
  }
  return labels;
}

FaceLabels invert(const FaceLabels& labels) {
  FaceLabels out = labels;
  for (auto& g : out.good) g = g ? 0 : 1;
  return out;
}

std::size_t TokenMask::ones() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

TokenMask build_token_mask(const FaceLabels& labels, const TokenSequence& seq) {
  if (labels.face_count() != seq.face_count) {
    throw AlignmentError("face labels cover " + std::to_string(labels.face_count()) +
                         " faces but the token sequence has " + std::to_string(seq.face_count));
  }
  if (!seq.source_faces.empty() && seq.source_faces.size() != seq.face_count) {
    throw AlignmentError("token sequence face order does not match its face count");
  }
  TokenMask out;
  out.face_count = seq.face_count;
  out.mask.reserve(seq.face_count * kTokensPerFace);
  for (std::size_t i = 0; i < seq.face_count; ++i) {
    const std::size_t face = seq.source_faces.empty() ? i : seq.source_faces[i];
    out.mask.insert(out.mask.end(), kTokensPerFace, labels.good[face]);
  }
  return out;
}

}  // namespace meshrft
