#include "meshrft/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <istream>
#include <map>
#include <ostream>
#include <thread>

#include "meshrft/errors.hpp"
#include "meshrft/obj_io.hpp"
#include "meshrft/sampling.hpp"

namespace meshrft {

using nlohmann::json;

json report_to_json(const MetricReport& r) {
  json j;
  j["schema"] = kSchemaVersion;
  j["ber"] = r.ber;
  j["ber_high"] = r.ber_high();
  j["ts"] = r.ts;
  j["s1"] = r.sub[0];
  j["s2"] = r.sub[1];
  j["s3"] = r.sub[2];
  j["s4"] = r.sub[3];
  j["hd"] = r.hd ? json(*r.hd) : json(nullptr);
  j["cd"] = r.cd ? json(*r.cd) : json(nullptr);
  if (r.hd_mesh_to_ref && r.hd_ref_to_mesh) {
    j["hd_directed"] = {{"mesh_to_pc", *r.hd_mesh_to_ref}, {"pc_to_mesh", *r.hd_ref_to_mesh}};
  }
  j["seed"] = r.seed;
  j["n_samples"] = r.sample_count;
  return j;
}

MetricReport report_from_json(const json& j) {
  try {
    MetricReport r;
    r.ber = j.at("ber").get<double>();
    r.ts = j.at("ts").get<double>();
    r.sub = {j.at("s1").get<double>(), j.at("s2").get<double>(), j.at("s3").get<double>(),
             j.at("s4").get<double>()};
    if (j.contains("hd") && !j["hd"].is_null()) r.hd = j["hd"].get<double>();
    if (j.contains("cd") && !j["cd"].is_null()) r.cd = j["cd"].get<double>();
    if (j.contains("hd_directed")) {
      r.hd_mesh_to_ref = j["hd_directed"].at("mesh_to_pc").get<double>();
      r.hd_ref_to_mesh = j["hd_directed"].at("pc_to_mesh").get<double>();
    }
    r.seed = j.value("seed", std::uint64_t{0});
    r.sample_count = j.value("n_samples", std::size_t{0});
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed metric report: ") + e.what());
  }
}

std::vector<Vec3> load_point_cloud(const std::filesystem::path& path, std::size_t samples,
                                   std::uint64_t seed) {
  const Mesh m = load_obj(path);
  if (m.empty()) {
    if (m.vertex_count() == 0) throw InputError("point cloud '" + path.string() + "' is empty");
    return m.vertices();
  }
  return sample_surface(m, samples, seed).points;
}

SetJob set_from_files(std::string id, const std::filesystem::path& point_cloud,
                      std::vector<std::filesystem::path> candidates) {
  SetJob job;
  job.id = id;
  job.load = [id, point_cloud, candidates = std::move(candidates)](const EvaluationOptions& eval) {
    CandidateSet set;
    set.id = id;
    set.point_cloud_path = point_cloud.string();
    set.point_cloud = load_point_cloud(point_cloud, eval.samples, point_cloud_seed(eval.seed));
    for (const auto& p : candidates) {
      set.candidates.push_back({p.stem().string(), p.string(), load_obj(p), std::nullopt});
    }
    return set;
  };
  return job;
}

SetJob set_from_directory(const std::filesystem::path& dir) {
  const auto pc = dir / "pointcloud.obj";
  std::vector<std::filesystem::path> candidates;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".obj" && entry.path().filename() != "pointcloud.obj") {
      candidates.push_back(entry.path());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  SetJob job = set_from_files(dir.filename().string(), pc, std::move(candidates));
  if (ec) {
    const std::string msg = "cannot list '" + dir.string() + "': " + ec.message();
    job.load = [msg](const EvaluationOptions&) -> CandidateSet { throw InputError(msg); };
  }
  return job;
}

MaskedTokens mask_mesh(const Mesh& mesh, std::uint32_t bins, double tau,
                       double dihedral_tolerance_deg) {
  MaskedTokens out;
  out.tokens = tokenize(quantize(mesh, bins));
  out.labels = label_faces(mesh, merge_to_quads(mesh, dihedral_tolerance_deg), tau);
  out.mask = build_token_mask(out.labels, out.tokens);
  return out;
}

json triplet_record(const CandidateSet& set, const PreferenceTriplet& t, const MaskedTokens& pos,
                    const MaskedTokens& neg, const DatasetOptions& opts) {
  const Candidate& cp = set.candidates[t.positive];
  const Candidate& cn = set.candidates[t.negative];
  auto interior = [](const TokenSequence& s) {
    const auto span = s.interior();
    return std::vector<Token>(span.begin(), span.end());
  };
  json j;
  j["schema"] = kSchemaVersion;
  j["set"] = set.id;
  j["pc"] = set.point_cloud_path;
  j["pos"] = cp.path.empty() ? cp.id : cp.path;
  j["neg"] = cn.path.empty() ? cn.id : cn.path;
  j["pos_id"] = cp.id;
  j["neg_id"] = cn.id;
  j["metrics"] = {{"pos", report_to_json(*cp.report)}, {"neg", report_to_json(*cn.report)}};
  j["deltas"] = {{"ber", t.delta_ber}, {"ts", t.delta_ts}, {"hd", t.delta_hd}};
  j["mask_pos"] = pos.mask.mask;
  j["mask_neg"] = neg.mask.mask;
  j["tokens_pos"] = interior(pos.tokens);
  j["tokens_neg"] = interior(neg.tokens);
  j["tau"] = opts.tau;
  j["bins"] = opts.bins;
  j["seed"] = opts.eval.seed;
  return j;
}

json DatasetSummary::to_json() const {
  return {{"schema", kSchemaVersion},
          {"sets_processed", sets_processed},
          {"sets_failed", sets_failed},
          {"pairs_examined", pairs_examined},
          {"triplets_emitted", triplets_emitted},
          {"dominance_rate", dominance_rate()}};
}

namespace {

struct SetOutcome {
  bool ok = false;
  std::string error;
  std::size_t pairs = 0;
  std::vector<std::string> lines;
};

SetOutcome process_set(const SetJob& job, const DatasetOptions& opts) {
  SetOutcome out;
  try {
    CandidateSet set = job.load(opts.eval);
    evaluate_set(set, opts.eval);
    const auto triplets = rank_pairs(set);
    if (!preference_relation_is_acyclic(triplets, set.candidates.size())) {
      throw InvariantError("preference relation of set '" + set.id + "' contains a cycle");
    }
    std::map<std::size_t, MaskedTokens> masks;
    auto masked = [&](std::size_t i) -> const MaskedTokens& {
      auto it = masks.find(i);
      if (it == masks.end()) {
        it = masks.emplace(i, mask_mesh(set.candidates[i].mesh, opts.bins, opts.tau,
                                        opts.eval.dihedral_tolerance_deg))
                 .first;
      }
      return it->second;
    };
    for (const auto& t : triplets) {
      out.lines.push_back(triplet_record(set, t, masked(t.positive), masked(t.negative), opts).dump());
    }
    out.pairs = pair_count(set.candidates.size());
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

DatasetSummary build_dataset(std::span<const SetJob> sets, std::ostream& sink,
                             const DatasetOptions& opts) {
  DatasetSummary summary;
  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.jobs, sets.size()));
  std::vector<std::promise<SetOutcome>> promises(sets.size());
  std::vector<std::future<SetOutcome>> futures;
  futures.reserve(sets.size());
  for (auto& p : promises) futures.push_back(p.get_future());

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers && !sets.empty(); ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < sets.size(); i = next++) {
        promises[i].set_value(process_set(sets[i], opts));
      }
    });
  }

  for (std::size_t i = 0; i < sets.size(); ++i) {
    SetOutcome outcome = futures[i].get();
    if (!outcome.ok) {
      ++summary.sets_failed;
      if (opts.diagnostic) opts.diagnostic("set '" + sets[i].id + "' skipped: " + outcome.error);
      continue;
    }
    for (const auto& line : outcome.lines) sink << line << '\n';
    if (!sink) {
      ++summary.sets_failed;
      if (opts.diagnostic) opts.diagnostic("set '" + sets[i].id + "': write to dataset sink failed");
      sink.clear();
      continue;
    }
    ++summary.sets_processed;
    summary.pairs_examined += outcome.pairs;
    summary.triplets_emitted += outcome.lines.size();
  }
  for (auto& t : threads) t.join();
  sink.flush();
  return summary;
}

LoadedDataset load_preference_dataset(std::istream& in) {
  LoadedDataset out;
  std::map<std::string, std::size_t> conditions;
  std::string line;
  std::size_t lineno = 0;
  bool have_bins = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const auto pc = j.at("pc").get<std::string>();
      auto [it, inserted] = conditions.try_emplace(pc, conditions.size());
      if (inserted) out.conditions.push_back(pc);
      const auto bins = j.value("bins", kDefaultBins);
      if (have_bins && bins != out.bins) {
        throw ParseError("<dataset>", lineno, "records mix vocabularies");
      }
      out.bins = bins;
      have_bins = true;

      PreferenceExample ex;
      ex.condition = it->second;
      ex.pos_tokens = j.at("tokens_pos").get<std::vector<Token>>();
      ex.neg_tokens = j.at("tokens_neg").get<std::vector<Token>>();
      ex.pos_mask = j.at("mask_pos").get<std::vector<std::uint8_t>>();
      ex.neg_mask = j.at("mask_neg").get<std::vector<std::uint8_t>>();
      if (ex.pos_mask.size() != ex.pos_tokens.size() || ex.neg_mask.size() != ex.neg_tokens.size()) {
        throw ParseError("<dataset>", lineno, "mask and token lengths differ");
      }
      out.examples.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw ParseError("<dataset>", lineno, e.what());
    }
  }
  return out;
}

json policy_to_json(const ToyPolicy& policy) {
  const auto l = policy.logits();
  return {{"schema", kSchemaVersion},
          {"order", policy.order()},
          {"vocab", policy.vocab()},
          {"conditions", policy.conditions()},
          {"logits", std::vector<double>(l.begin(), l.end())}};
}

ToyPolicy policy_from_json(const json& j) {
  try {
    ToyPolicy p(j.at("order").get<std::size_t>(), j.at("vocab").get<std::size_t>(),
                j.at("conditions").get<std::size_t>());
    const auto logits = j.at("logits").get<std::vector<double>>();
    if (logits.size() != p.logits().size()) throw InputError("checkpoint logit count mismatch");
    std::copy(logits.begin(), logits.end(), p.logits().begin());
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed policy checkpoint: ") + e.what());
  }
}

}  // namespace meshrft
