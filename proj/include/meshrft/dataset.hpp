#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "meshrft/mdpo.hpp"
#include "meshrft/preference.hpp"
#include "meshrft/quality_mask.hpp"
#include "meshrft/toy_policy.hpp"

namespace meshrft {

inline constexpr int kSchemaVersion = 1;

nlohmann::json report_to_json(const MetricReport& r);
MetricReport report_from_json(const nlohmann::json& j);

struct DatasetOptions {
  EvaluationOptions eval;
  std::uint32_t bins = kDefaultBins;
  double tau = kDefaultQualityThreshold;
  std::size_t jobs = 1;
  /// Receives one line per skipped set.
  std::function<void(const std::string&)> diagnostic;
};

/// Loads a candidate set lazily so that load failures are per-set.
struct SetJob {
  std::string id;
  std::function<CandidateSet(const EvaluationOptions&)> load;
};

/// A directory holding `pointcloud.obj` and candidate meshes `*.obj`;
/// candidate ids are file stems. The point cloud is read with
/// load_point_cloud.
SetJob set_from_directory(const std::filesystem::path& dir);

SetJob set_from_files(std::string id, const std::filesystem::path& point_cloud,
                      std::vector<std::filesystem::path> candidates);

/// Sampling stream for point clouds given as meshes, distinct from the
/// candidate sampling stream that uses `seed` itself.
inline std::uint64_t point_cloud_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

/// Reads points from an OBJ: vertices only when it has no faces, otherwise
/// `samples` area-weighted surface samples drawn with `seed`.
std::vector<Vec3> load_point_cloud(const std::filesystem::path& path, std::size_t samples,
                                   std::uint64_t seed);

/// Quality mask and interior tokens of one mesh.
struct MaskedTokens {
  TokenSequence tokens;
  FaceLabels labels;
  TokenMask mask;
};

MaskedTokens mask_mesh(const Mesh& mesh, std::uint32_t bins, double tau,
                       double dihedral_tolerance_deg);

/// One JSONL record per triplet, with both token sequences and masks inlined.
nlohmann::json triplet_record(const CandidateSet& set, const PreferenceTriplet& t,
                              const MaskedTokens& pos, const MaskedTokens& neg,
                              const DatasetOptions& opts);

struct DatasetSummary {
  std::size_t sets_processed = 0;
  std::size_t sets_failed = 0;
  std::size_t pairs_examined = 0;
  std::size_t triplets_emitted = 0;

  double dominance_rate() const {
    return pairs_examined == 0 ? 0.0
                               : static_cast<double>(triplets_emitted) /
                                     static_cast<double>(pairs_examined);
  }
  nlohmann::json to_json() const;
};

/// Evaluates and ranks every set, writing triplet lines to `sink` in set
/// order. Sets run on up to `opts.jobs` threads; only the calling thread
/// writes. A set that fails is reported through `opts.diagnostic` and skipped.
DatasetSummary build_dataset(std::span<const SetJob> sets, std::ostream& sink,
                             const DatasetOptions& opts);

struct LoadedDataset {
  std::vector<PreferenceExample> examples;
  std::vector<std::string> conditions;  ///< point cloud key per conditioning id
  std::uint32_t bins = kDefaultBins;
};

/// Parses triplet JSONL; conditioning ids follow first appearance of `pc`.
LoadedDataset load_preference_dataset(std::istream& in);

nlohmann::json policy_to_json(const ToyPolicy& policy);
ToyPolicy policy_from_json(const nlohmann::json& j);

}  // namespace meshrft
