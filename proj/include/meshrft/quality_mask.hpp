#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "meshrft/mesh.hpp"
#include "meshrft/quad_merge.hpp"
#include "meshrft/tokenizer.hpp"

namespace meshrft {

/// Per-quad quality weights for angle, aspect and adjacency terms: the
/// topology weights 0.2 / 0.3 / 0.1 renormalized to sum to one.
struct QualityWeights {
  double angle = 1.0 / 3.0;
  double aspect = 1.0 / 2.0;
  double adjacency = 1.0 / 6.0;
};

inline constexpr double kDefaultQualityThreshold = 0.8;

/// Single-quad quality in [0, 1]:
///   angle:     1 - sum |a - 90| / 360
///   aspect:    0.5 / r_q + 0.5 * e_q
///   adjacency: 1 / (1 + mean |r_q - r_n| over `neighborhood`), 1 when empty
double quad_quality(const QuadGeometry& geom, std::span<const QuadGeometry> neighborhood,
                    const QualityWeights& weights = {});

struct FaceLabels {
  std::vector<std::uint8_t> good;    ///< per source triangle, 1 = good
  std::vector<double> quad_scores;   ///< per quad of the QuadMesh; 0 if degenerate
  double tau = kDefaultQualityThreshold;

  std::size_t face_count() const noexcept { return good.size(); }
  std::size_t good_count() const;
};

/// A triangle is good iff it was merged into a quad whose quality is >= tau.
/// Degenerate quads score 0; adjacency terms use the non-degenerate quads of
/// the full QuadMesh.
FaceLabels label_faces(const Mesh& mesh, const QuadMesh& qm, double tau = kDefaultQualityThreshold,
                       const QualityWeights& weights = {});

FaceLabels invert(const FaceLabels& labels);

struct TokenMask {
  std::vector<std::uint8_t> mask;  ///< aligned with TokenSequence::interior()
  std::size_t face_count = 0;

  std::size_t ones() const;
};

/// Expands face labels into 9-token blocks following the sequence's face
/// order. Throws AlignmentError when the face counts differ.
TokenMask build_token_mask(const FaceLabels& labels, const TokenSequence& seq);

}  // namespace meshrft
