#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "meshrft/mesh.hpp"

namespace meshrft {

inline constexpr std::uint32_t kDefaultBins = 1024;
inline constexpr std::size_t kTokensPerFace = 9;

using GridPoint = std::array<std::uint32_t, 3>;
using Token = std::uint32_t;

/// Vertices snapped to an integer grid of `bins` cells per axis.
///
/// Faces keep the source mesh's vertex indexing. After snapping, two corners
/// of one face may land on the same cell; such faces are kept and reported
/// by degenerate_faces() rather than dropped, so edge counts are preserved.
struct QuantizedMesh {
  std::vector<GridPoint> grid;
  std::vector<Triangle> faces;
  UnitCubeTransform transform;
  std::uint32_t bins = kDefaultBins;

  std::size_t face_count() const noexcept { return faces.size(); }

  /// Grid cell center mapped back to model coordinates.
  Vec3 dequantize(std::size_t vertex) const;
  std::vector<std::size_t> degenerate_faces() const;
};

QuantizedMesh quantize(const Mesh& mesh, std::uint32_t bins = kDefaultBins);

/// Coordinate tokens are the grid values [0, bins); SOS and EOS use the two
/// ids just past the coordinate vocabulary.
struct TokenSequence {
  std::vector<Token> tokens;
  std::size_t face_count = 0;
  std::uint32_t bins = kDefaultBins;
  bool has_markers = true;
  /// Source face index for each emitted face, in token order.
  std::vector<std::uint32_t> source_faces;

  Token sos() const noexcept { return bins; }
  Token eos() const noexcept { return bins + 1; }

  /// Coordinate tokens only, 9 per face.
  std::span<const Token> interior() const;
};

/// Canonical serialization: each face is rotated to the cyclic order whose
/// (z, y, x)-keyed corner tuple is lexicographically smallest, faces are sorted
/// by that tuple, and each corner is emitted as X, Y, Z.
TokenSequence tokenize(const QuantizedMesh& qmesh);

/// Inverse of tokenize; corners with identical grid coordinates share a vertex.
/// The returned mesh carries the identity unit-cube transform.
QuantizedMesh detokenize(const TokenSequence& seq, std::uint32_t bins);
QuantizedMesh detokenize(std::span<const Token> interior, std::uint32_t bins);

/// Newline-delimited token ids.
void write_tokens(std::ostream& out, const TokenSequence& seq);

}  // namespace meshrft
