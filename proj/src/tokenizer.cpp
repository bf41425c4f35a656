#include "meshrft/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

#include "meshrft/errors.hpp"

namespace meshrft {
namespace {

// Corner ordering key: Z first, then Y, then X.
using CornerKey = std::array<std::uint32_t, 3>;
using FaceKey = std::array<CornerKey, 3>;

CornerKey corner_key(const GridPoint& g) { return {g[2], g[1], g[0]}; }

FaceKey canonical_face_key(const QuantizedMesh& q, const Triangle& f) {
  FaceKey best{};
  for (int r = 0; r < 3; ++r) {
    FaceKey key{corner_key(q.grid[f[r]]), corner_key(q.grid[f[(r + 1) % 3]]),
                corner_key(q.grid[f[(r + 2) % 3]])};
    if (r == 0 || key < best) best = key;
  }
  return best;
}

}  // namespace

Vec3 QuantizedMesh::dequantize(std::size_t vertex) const {
  const GridPoint& g = grid[vertex];
  const double inv = 1.0 / bins;
  return transform.invert({(g[0] + 0.5) * inv, (g[1] + 0.5) * inv, (g[2] + 0.5) * inv});
}

std::vector<std::size_t> QuantizedMesh::degenerate_faces() const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    auto p = [&](int k) {
      const GridPoint& g = grid[faces[f][k]];
      return std::array<std::int64_t, 3>{g[0], g[1], g[2]};
    };
    const auto a = p(0), b = p(1), c = p(2);
    const std::int64_t ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const std::int64_t vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    if (uy * vz - uz * vy == 0 && uz * vx - ux * vz == 0 && ux * vy - uy * vx == 0) {
      out.push_back(f);
    }
  }
  return out;
}

QuantizedMesh quantize(const Mesh& mesh, std::uint32_t bins) {
  if (bins < 2) throw InputError("quantization needs at least 2 bins");
  if (mesh.vertex_count() == 0) throw DegenerateGeometryError("cannot quantize an empty mesh");

  QuantizedMesh q;
  q.bins = bins;
  q.transform = UnitCubeTransform::fit(mesh.vertices());
  q.faces = mesh.faces();
  q.grid.reserve(mesh.vertex_count());
  for (const Vec3& v : mesh.vertices()) {
    const Vec3 n = q.transform.apply(v);
    GridPoint g{};
    for (int axis = 0; axis < 3; ++axis) {
      const double cell = std::floor(n[axis] * bins);
      g[axis] = static_cast<std::uint32_t>(std::clamp(cell, 0.0, static_cast<double>(bins - 1)));
    }
    q.grid.push_back(g);
  }
  return q;
}

std::span<const Token> TokenSequence::interior() const {
  std::span<const Token> all(tokens);
  if (!has_markers) return all;
  if (all.size() < 2) return {};
  return all.subspan(1, all.size() - 2);
}

TokenSequence tokenize(const QuantizedMesh& qmesh) {
  const std::size_t nf = qmesh.faces.size();
  std::vector<FaceKey> keys(nf);
  for (std::size_t f = 0; f < nf; ++f) keys[f] = canonical_face_key(qmesh, qmesh.faces[f]);

  std::vector<std::uint32_t> order(nf);
  std::iota(order.begin(), order.end(), 0u);
  // stable: identical keys keep source order, so source_faces is deterministic
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });

  TokenSequence seq;
  seq.bins = qmesh.bins;
  seq.face_count = nf;
  seq.has_markers = true;
  seq.source_faces = order;
  seq.tokens.reserve(nf * kTokensPerFace + 2);
  seq.tokens.push_back(seq.sos());
  for (std::uint32_t f : order) {
    for (const CornerKey& c : keys[f]) {
      seq.tokens.push_back(c[2]);  // X
      seq.tokens.push_back(c[1]);  // Y
      seq.tokens.push_back(c[0]);  // Z
    }
  }
  seq.tokens.push_back(seq.eos());
  return seq;
}

QuantizedMesh detokenize(std::span<const Token> interior, std::uint32_t bins) {
  if (bins < 2) throw InputError("quantization needs at least 2 bins");
  if (interior.size() % kTokensPerFace != 0) {
    throw LengthError("token count " + std::to_string(interior.size()) +
                      " is not a multiple of " + std::to_string(kTokensPerFace));
  }
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (interior[i] >= bins) {
      throw VocabularyError("token " + std::to_string(interior[i]) + " at position " +
                            std::to_string(i) + " is outside the coordinate vocabulary [0, " +
                            std::to_string(bins) + ")");
    }
  }

  QuantizedMesh q;
  q.bins = bins;
  q.transform = UnitCubeTransform{{0.5, 0.5, 0.5}, 1.0};
  std::map<GridPoint, VertexIndex> index;
  for (std::size_t base = 0; base < interior.size(); base += kTokensPerFace) {
    Triangle f{};
    for (int k = 0; k < 3; ++k) {
      const GridPoint g{interior[base + 3 * k], interior[base + 3 * k + 1],
                        interior[base + 3 * k + 2]};
      auto [it, inserted] = index.try_emplace(g, static_cast<VertexIndex>(q.grid.size()));
      if (inserted) q.grid.push_back(g);
      f[k] = it->second;
    }
    q.faces.push_back(f);
  }
  return q;
}

QuantizedMesh detokenize(const TokenSequence& seq, std::uint32_t bins) {
  if (seq.has_markers) {
    if (seq.tokens.size() < 2 || seq.tokens.front() != bins || seq.tokens.back() != bins + 1) {
      throw LengthError("token sequence is missing its SOS/EOS markers");
    }
  }
  return detokenize(seq.interior(), bins);
}

void write_tokens(std::ostream& out, const TokenSequence& seq) {
  for (Token t : seq.tokens) out << t << '\n';
}

}  // namespace meshrft
