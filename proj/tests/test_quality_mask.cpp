#include <cmath>
#include <numbers>

#include "doctest.h"
#include "meshrft/errors.hpp"
#include "meshrft/quality_mask.hpp"
#include "meshrft/synthetic.hpp"
#include "test_support.hpp"

using namespace meshrft;
using meshrft::testing::single_triangle;

namespace {

QuadGeometry hand_geometry(std::array<double, 4> angles, double r, double e) {
  QuadGeometry g;
  g.angles_deg = angles;
  g.sides = {1, 1, 1, 1};
  g.aspect_ratio = r;
  g.edge_ratio = e;
  return g;
}

// Quality of a planar quad loop from first principles: angles by acos of the
// normalized dot product, sides by Pythagoras.
double oracle_quality(const std::array<Vec3, 4>& p, const std::vector<double>& neighbor_r) {
  std::array<double, 4> l{}, ang{};
  for (int i = 0; i < 4; ++i) {
    const Vec3 d = p[(i + 1) % 4] - p[i];
    l[i] = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
  }
  for (int i = 0; i < 4; ++i) {
    const Vec3 a = p[(i + 3) % 4] - p[i], b = p[(i + 1) % 4] - p[i];
    ang[i] = std::acos(dot(a, b) / (norm(a) * norm(b))) * 180.0 / std::numbers::pi;
  }
  const double r = std::max(std::max(l[0], l[2]) / std::min(l[0], l[2]),
                            std::max(l[1], l[3]) / std::min(l[1], l[3]));
  const double lmax = std::max({l[0], l[1], l[2], l[3]});
  const double e = (l[0] + l[1] + l[2] + l[3]) / (4.0 * lmax);
  double dev = 0.0;
  for (double a : ang) dev += std::abs(a - 90.0);
  double d = 0.0;
  for (double rn : neighbor_r) d += std::abs(r - rn);
  if (!neighbor_r.empty()) d /= static_cast<double>(neighbor_r.size());
  return (1.0 / 3.0) * (1.0 - dev / 360.0) + 0.5 * (0.5 / r + 0.5 * e) + (1.0 / 6.0) / (1.0 + d);
}

// Unit square on the left, a skewed convex quad sharing its right edge.
Mesh square_and_skew() {
  std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {2.6, 0, 0}, {2.0, 1, 0}};
  std::vector<Triangle> f{{0, 1, 2}, {0, 2, 3}, {1, 4, 5}, {1, 5, 2}};
  return Mesh(std::move(v), std::move(f));
}

}  // namespace

TEST_CASE("quad quality examples") {
  const QuadGeometry square = hand_geometry({90, 90, 90, 90}, 1.0, 1.0);
  const std::vector<QuadGeometry> same(4, square);
  CHECK(quad_quality(square, same) == doctest::Approx(1.0).epsilon(1e-15));

  const QuadGeometry long_quad = hand_geometry({90, 90, 90, 90}, 2.0, 0.75);
  CHECK(quad_quality(long_quad, {}) == doctest::Approx(0.8125).epsilon(1e-15));

  const QuadGeometry rhombus = hand_geometry({60, 120, 60, 120}, 1.0, 1.0);
  CHECK(quad_quality(rhombus, {}) == doctest::Approx(8.0 / 9.0).epsilon(1e-15));

  const QualityWeights w;
  CHECK(w.angle + w.aspect + w.adjacency == doctest::Approx(1.0));
  CHECK(w.angle / w.aspect == doctest::Approx(0.2 / 0.3));
  CHECK(w.aspect / w.adjacency == doctest::Approx(0.3 / 0.1));
}

TEST_CASE("face labels") {
  SUBCASE("all-square grid is all good") {
    const Mesh grid = make_grid_mesh(3, 2);
    const FaceLabels l = label_faces(grid, merge_to_quads(grid), 0.8);
    CHECK(l.good_count() == grid.face_count());
    for (double s : l.quad_scores) CHECK(s == doctest::Approx(1.0));
  }
  SUBCASE("a lone triangle is bad") {
    const Mesh tri = single_triangle();
    const FaceLabels l = label_faces(tri, merge_to_quads(tri));
    CHECK(l.good == std::vector<std::uint8_t>{0});
  }
  SUBCASE("a skewed quad below tau marks only its two triangles bad") {
    const Mesh m = square_and_skew();
    const QuadMesh qm = merge_to_quads(m);
    REQUIRE(qm.quads.size() == 2);
    const auto& v = m.vertices();
    const double skew = oracle_quality({v[1], v[4], v[5], v[2]}, {1.0});
    const double square = oracle_quality({v[0], v[1], v[2], v[3]}, {1.6});
    REQUIRE(skew < 0.8);
    REQUIRE(square >= 0.8);

    const FaceLabels l = label_faces(m, qm, 0.8);
    CHECK(l.good == std::vector<std::uint8_t>{1, 1, 0, 0});
    std::vector<double> sorted = l.quad_scores;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[0] == doctest::Approx(skew).epsilon(1e-12));
    CHECK(sorted[1] == doctest::Approx(square).epsilon(1e-12));

    // lowering tau below the skewed score admits it
    CHECK(label_faces(m, qm, skew - 1e-6).good_count() == 4);
  }
}

TEST_CASE("label invariants on degraded meshes") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const Mesh m = degrade_mesh(make_box_mesh(2), {0.04, 0.1, 0.4}, rng());
    const QuadMesh qm = merge_to_quads(m);
    const double tau = 0.5 + 0.5 * unit_uniform(rng);
    const FaceLabels l = label_faces(m, qm, tau);
    for (auto f : qm.residual_triangles) CHECK(l.good[f] == 0);
    for (std::size_t i = 0; i < qm.quads.size(); ++i) {
      const std::uint8_t expected = l.quad_scores[i] >= tau ? 1 : 0;
      CHECK(l.good[qm.provenance[i].first] == expected);
      CHECK(l.good[qm.provenance[i].second] == expected);
    }
  }
}

TEST_CASE("token mask block law") {
  TokenSequence seq;
  seq.face_count = 3;
  FaceLabels l;
  l.good = {1, 0, 1};
  const TokenMask m = build_token_mask(l, seq);
  std::vector<std::uint8_t> expected(27, 1);
  std::fill(expected.begin() + 9, expected.begin() + 18, 0);
  CHECK(m.mask == expected);

  seq.face_count = 4;
  l.good = {1, 1, 1, 1};
  CHECK(build_token_mask(l, seq).ones() == 36);
  l.good = {0, 0, 0, 0};
  const TokenMask zeros = build_token_mask(l, seq);
  CHECK(zeros.mask.size() == 36);
  CHECK(zeros.ones() == 0);

  l.good = {1, 1, 1};
  CHECK_THROWS_AS(build_token_mask(l, seq), AlignmentError);
}

TEST_CASE("token mask follows the canonical face order") {
  const Mesh m = square_and_skew();
  const FaceLabels l = label_faces(m, merge_to_quads(m), 0.8);
  const TokenSequence seq = tokenize(quantize(m, 64));
  const TokenMask mask = build_token_mask(l, seq);
  REQUIRE(mask.mask.size() == seq.interior().size());
  for (std::size_t k = 0; k < seq.face_count; ++k) {
    const std::uint8_t want = l.good[seq.source_faces[k]];
    for (std::size_t j = 0; j < 9; ++j) CHECK(mask.mask[9 * k + j] == want);
  }
}

TEST_CASE("mask laws over randomized fixtures") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const Mesh base = (trial % 2 == 0) ? make_box_mesh(1 + trial % 3) : make_grid_mesh(2 + trial % 3, 2);
    const Mesh m = degrade_mesh(base, {0.05 * unit_uniform(rng), 0.2 * unit_uniform(rng), 0.5 * unit_uniform(rng)},
                                rng());
    if (m.empty()) continue;
    const double tau = unit_uniform(rng);
    const FaceLabels l = label_faces(m, merge_to_quads(m), tau);
    const TokenSequence seq = tokenize(quantize(m, 128));
    const TokenMask pos = build_token_mask(l, seq);
    const TokenMask neg = build_token_mask(invert(l), seq);

    REQUIRE(pos.mask.size() == 9 * m.face_count());
    CHECK(pos.ones() % 9 == 0);
    CHECK(pos.ones() == 9 * l.good_count());
    for (std::size_t i = 0; i < pos.mask.size(); ++i) {
      CHECK(pos.mask[i] + neg.mask[i] == 1);
      CHECK(pos.mask[i] == pos.mask[i - i % 9]);
    }
  }
}

TEST_CASE("mask is stable under perturbations below the grid resolution") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Mesh m = degrade_mesh(make_grid_mesh(4, 3), {0.05, 0.0, 0.0}, rng());
    std::vector<Vec3> shifted(m.vertices().begin(), m.vertices().end());
    for (auto& p : shifted) {
      p.x += 1e-12 * (unit_uniform(rng) - 0.5);
      p.y += 1e-12 * (unit_uniform(rng) - 0.5);
    }
    const Mesh n(std::move(shifted), std::vector<Triangle>(m.faces().begin(), m.faces().end()));

    const FaceLabels la = label_faces(m, merge_to_quads(m));
    const FaceLabels lb = label_faces(n, merge_to_quads(n));
    bool near_tau = false;
    for (double s : la.quad_scores) near_tau |= std::abs(s - la.tau) < 1e-6;
    if (near_tau) continue;

    const TokenSequence sa = tokenize(quantize(m, 256));
    const TokenSequence sb = tokenize(quantize(n, 256));
    if (sa.tokens != sb.tokens) continue;
    CHECK(build_token_mask(la, sa).mask == build_token_mask(lb, sb).mask);
  }
}
