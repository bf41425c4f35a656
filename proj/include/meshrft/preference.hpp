#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshrft/mesh.hpp"
#include "meshrft/topo_metrics.hpp"

namespace meshrft {

inline constexpr std::size_t kDefaultCandidateCount = 8;

struct Candidate {
  std::string id;
  std::string path;  ///< source file, echoed into the dataset; may be empty
  Mesh mesh;
  std::optional<MetricReport> report;
};

struct CandidateSet {
  std::string id;
  std::string point_cloud_path;
  std::vector<Vec3> point_cloud;
  std::vector<Candidate> candidates;
};

struct PreferenceTriplet {
  std::string set_id;
  std::size_t positive = 0;  ///< index into CandidateSet::candidates
  std::size_t negative = 0;
  double delta_ber = 0.0;    ///< BER(M-) - BER(M+), > 0
  double delta_ts = 0.0;     ///< TS(M+) - TS(M-), > 0
  double delta_hd = 0.0;     ///< HD(M-) - HD(M+), > 0
};

/// Strictly better on all three of BER (lower), TS (higher) and HD (lower).
/// Any tie breaks dominance.
bool dominates(const MetricReport& a, const MetricReport& b);

/// Examines every unordered pair, ordered by candidate id, and keeps the
/// pairs where one side dominates. Throws MissingMetricError naming the first
/// candidate without a complete report.
std::vector<PreferenceTriplet> rank_pairs(const CandidateSet& set);

inline std::size_t pair_count(std::size_t candidates) {
  return candidates < 2 ? 0 : candidates * (candidates - 1) / 2;
}

/// True when the emitted preference relation has no 2-cycles or longer cycles.
bool preference_relation_is_acyclic(std::span<const PreferenceTriplet> triplets,
                                    std::size_t candidate_count);

/// Fills missing reports by evaluating each candidate against the set's
/// point cloud.
void evaluate_set(CandidateSet& set, const EvaluationOptions& opts);

}  // namespace meshrft
