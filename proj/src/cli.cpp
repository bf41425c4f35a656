#include "meshrft/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "meshrft/dataset.hpp"
#include "meshrft/errors.hpp"
#include "meshrft/mdpo.hpp"
#include "meshrft/obj_io.hpp"
#include "meshrft/quality_mask.hpp"
#include "meshrft/sampling.hpp"
#include "meshrft/synthetic.hpp"
#include "meshrft/topo_metrics.hpp"

namespace meshrft::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string mesh;
  std::string point_cloud;
  std::string candidates;
  std::string sets;
  std::string dataset;
  std::string reports;
  std::string output;
  std::string trace;
  std::string checkpoint;
  std::string quads_out;
  std::size_t samples = kDefaultSampleCount;
  std::uint64_t seed = 0;
  double tau = kDefaultQualityThreshold;
  double beta = 0.5;
  double lr = 0.1;
  std::size_t steps = 200;
  std::size_t order = 1;
  std::string form = "l1";
  bool global = false;
  double dihedral = kDefaultDihedralToleranceDeg;
  std::uint32_t bins = kDefaultBins;
  std::size_t jobs = 1;
  std::size_t count = kDefaultCandidateCount;
  std::size_t grid = 4;
  int verbosity = 0;
};

void validate(const RunConfig& c) {
  if (c.samples < 1) throw InputError("--samples must be at least 1");
  if (!(c.tau >= 0.0 && c.tau <= 1.0)) throw InputError("--tau must lie in [0, 1]");
  if (!(c.beta > 0.0)) throw InputError("--beta must be positive");
  if (!(c.lr >= 0.0)) throw InputError("--lr must be non-negative");
  if (!(c.dihedral > 0.0 && c.dihedral <= 180.0)) {
    throw InputError("--dihedral must lie in (0, 180]");
  }
  if (c.bins < 2) throw InputError("--bins must be at least 2");
  if (c.jobs < 1) throw InputError("--jobs must be at least 1");
  if (c.form != "l1" && c.form != "token") throw InputError("--form must be 'l1' or 'token'");
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw InputError("failed writing '" + path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

EvaluationOptions eval_options(const RunConfig& c) {
  return {c.samples, c.seed, c.dihedral};
}

int cmd_score(const RunConfig& c, std::ostream& out) {
  const Mesh mesh = load_obj(c.mesh);
  const EvaluationOptions opts = eval_options(c);
  MetricReport report;
  if (c.point_cloud.empty()) {
    report = evaluate_topology(mesh, opts);
  } else {
    const auto cloud = load_point_cloud(c.point_cloud, c.samples, point_cloud_seed(c.seed));
    report = evaluate_candidate(mesh, cloud, opts);
  }
  if (!c.quads_out.empty()) {
    std::ostringstream obj;
    write_quad_obj(obj, merge_to_quads(mesh, c.dihedral), mesh);
    emit(obj.str(), c.quads_out, out);
  }
  emit(dump(report_to_json(report)), c.output, out);
  return kOk;
}

int cmd_mask(const RunConfig& c, std::ostream& out) {
  const Mesh mesh = load_obj(c.mesh);
  const MaskedTokens m = mask_mesh(mesh, c.bins, c.tau, c.dihedral);
  json j;
  j["schema"] = kSchemaVersion;
  j["face_labels"] = m.labels.good;
  j["token_mask"] = m.mask.mask;
  j["tau"] = c.tau;
  j["good_fraction"] = mesh.face_count() == 0
                           ? 0.0
                           : static_cast<double>(m.labels.good_count()) /
                                 static_cast<double>(mesh.face_count());
  j["bins"] = c.bins;
  emit(dump(j), c.output, out);
  return kOk;
}

DatasetOptions dataset_options(const RunConfig& c, std::ostream& err) {
  DatasetOptions d;
  d.eval = eval_options(c);
  d.bins = c.bins;
  d.tau = c.tau;
  d.jobs = c.jobs;
  d.diagnostic = [&err](const std::string& msg) { err << "warning: " << msg << '\n'; };
  return d;
}

int write_dataset(std::span<const SetJob> jobs, const RunConfig& c, std::ostream& out,
                  std::ostream& err) {
  std::ofstream sink(c.output, std::ios::binary);
  if (!sink) throw InputError("cannot open '" + c.output + "' for writing");
  const DatasetSummary summary = build_dataset(jobs, sink, dataset_options(c, err));
  json j = summary.to_json();
  j["seed"] = c.seed;
  out << dump(j);
  return summary.sets_failed == 0 ? kOk : kUsage;
}

int cmd_rank(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> candidates;
  if (!fs::is_directory(c.candidates)) {
    throw InputError("'" + c.candidates + "' is not a directory");
  }
  for (const auto& e : fs::directory_iterator(c.candidates)) {
    if (e.path().extension() == ".obj" && fs::path(c.point_cloud) != e.path()) {
      candidates.push_back(e.path());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  if (candidates.size() < 2) throw InputError("ranking needs at least two candidate meshes");
  const std::vector<SetJob> jobs{
      set_from_files(fs::path(c.candidates).filename().string(), c.point_cloud, candidates)};
  return write_dataset(jobs, c, out, err);
}

int cmd_build_dataset(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(c.sets)) throw InputError("'" + c.sets + "' is not a directory");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(c.sets)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<SetJob> jobs;
  for (const auto& d : dirs) jobs.push_back(set_from_directory(d));
  return write_dataset(jobs, c, out, err);
}

int cmd_train_toy(const RunConfig& c, std::ostream& out) {
  std::ifstream in(c.dataset);
  if (!in) throw InputError("cannot open dataset '" + c.dataset + "'");
  const LoadedDataset data = load_preference_dataset(in);
  if (data.examples.empty()) throw InputError("dataset '" + c.dataset + "' has no triplets");

  MdpoConfig cfg;
  cfg.beta = c.beta;
  cfg.learning_rate = c.lr;
  cfg.steps = c.steps;
  cfg.seed = c.seed;
  cfg.form = c.form == "token" ? RatioForm::token_log_ratio : RatioForm::l1_ratio;
  cfg.global_masks = c.global;
  cfg.jobs = c.jobs;

  const ToyPolicy reference =
      ToyPolicy::random(c.order, data.bins, data.conditions.size(), c.seed);
  const TrainingResult result = train_toy(reference, data.examples, cfg);

  if (!c.trace.empty()) {
    std::ostringstream csv;
    write_trace_csv(csv, result.trace);
    emit(csv.str(), c.trace, out);
  }
  if (!c.checkpoint.empty()) emit(policy_to_json(result.policy).dump() + "\n", c.checkpoint, out);

  json j;
  j["schema"] = kSchemaVersion;
  j["seed"] = c.seed;
  j["triplets"] = data.examples.size();
  j["steps"] = c.steps;
  j["initial_loss"] = result.trace.front().loss;
  j["final_loss"] = result.trace.back().loss;
  j["final_margin"] = result.trace.back().margin;
  j["masked_mass_initial"] = masked_positive_mass(reference, data.examples);
  j["masked_mass_final"] = masked_positive_mass(result.policy, data.examples);
  emit(dump(j), c.output, out);
  return kOk;
}

struct Column {
  std::vector<double> values;

  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return values.empty() ? 0.0 : s / static_cast<double>(values.size());
  }
  double median() const {
    if (values.empty()) return 0.0;
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
};

int cmd_report(const RunConfig& c, std::ostream& out) {
  if (!fs::is_directory(c.reports)) throw InputError("'" + c.reports + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(c.reports)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  // Table column order: CD, HD, TS, BER
  const std::vector<std::string> names{"cd", "hd", "ts", "ber"};
  std::map<std::string, Column> cols;
  for (const auto& f : files) {
    std::ifstream in(f);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw InputError("'" + f.string() + "': " + e.what());
    }
    const MetricReport r = report_from_json(j);
    if (r.cd) cols["cd"].values.push_back(*r.cd);
    if (r.hd) cols["hd"].values.push_back(*r.hd);
    cols["ts"].values.push_back(r.ts);
    cols["ber"].values.push_back(r.ber);
  }

  json summary;
  summary["schema"] = kSchemaVersion;
  summary["count"] = files.size();
  std::ostringstream table;
  table << std::left << std::setw(8) << "Metrics";
  for (const auto& n : names) {
    std::string upper = n;
    std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
    table << std::setw(12) << upper;
  }
  table << '\n';
  for (const std::string stat : {"mean", "median"}) {
    table << std::setw(8) << stat;
    for (const auto& n : names) {
      const Column& col = cols[n];
      const double v = stat == "mean" ? col.mean() : col.median();
      if (col.values.empty()) {
        table << std::setw(12) << "-";
        summary["metrics"][n][stat] = nullptr;
      } else {
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(4) << v;
        table << std::setw(12) << cell.str();
        summary["metrics"][n][stat] = v;
      }
      summary["metrics"][n]["count"] = col.values.size();
    }
    table << '\n';
  }
  out << table.str();
  if (!c.output.empty()) emit(dump(summary), c.output, out);
  return kOk;
}

int cmd_synth(const RunConfig& c, std::ostream& out) {
  fs::create_directories(c.output);
  const Mesh seed_mesh = c.mesh.empty() ? make_box_mesh(c.grid) : load_obj(c.mesh);
  const auto candidates = make_synthetic_candidates(seed_mesh, c.count, c.seed);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "cand_%02zu.obj", i);
    save_obj(fs::path(c.output) / name, candidates[i]);
  }
  const SampledSurface pc = sample_surface(seed_mesh, c.samples, point_cloud_seed(c.seed));
  std::ofstream f(fs::path(c.output) / "pointcloud.obj");
  f << std::setprecision(17);
  for (const Vec3& p : pc.points) f << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
  if (!f) throw InputError("failed writing point cloud");
  out << dump({{"schema", kSchemaVersion}, {"candidates", candidates.size()}, {"seed", c.seed}});
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Topology-aware mesh scoring, preference data and masked DPO tooling", "meshrft"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", c.verbosity, "More diagnostics on stderr");

  auto add_geometry = [&](CLI::App* s) {
    s->add_option("--dihedral", c.dihedral, "Max bend (degrees) between merged triangles");
  };
  auto add_sampling = [&](CLI::App* s) {
    s->add_option("--samples", c.samples, "Surface samples per mesh");
    s->add_option("--seed", c.seed, "Random seed");
  };
  auto add_masking = [&](CLI::App* s) {
    s->add_option("--tau", c.tau, "Quad quality threshold for good faces");
    s->add_option("--bins", c.bins, "Coordinate quantization bins");
  };

  auto* score = app.add_subcommand("score", "Compute BER, TS and optionally HD/CD for one mesh");
  score->add_option("mesh", c.mesh, "Mesh OBJ")->required();
  score->add_option("--pc,--pointcloud", c.point_cloud, "Reference point cloud OBJ");
  score->add_option("--out", c.output, "Write JSON here instead of stdout");
  score->add_option("--quads-out", c.quads_out, "Write the quad-dominant mesh as OBJ");
  add_sampling(score);
  add_geometry(score);

  auto* mask = app.add_subcommand("mask", "Label faces and expand the token quality mask");
  mask->add_option("mesh", c.mesh, "Mesh OBJ")->required();
  mask->add_option("--out", c.output, "Write JSON here instead of stdout");
  add_masking(mask);
  add_geometry(mask);

  auto* rank = app.add_subcommand("rank", "Rank one candidate set into preference triplets");
  rank->add_option("--candidates", c.candidates, "Directory of candidate OBJs")->required();
  rank->add_option("--pointcloud,--pc", c.point_cloud, "Conditioning point cloud OBJ")->required();
  rank->add_option("--out", c.output, "Triplet JSONL output")->required();
  add_sampling(rank);
  add_masking(rank);
  add_geometry(rank);

  auto* build = app.add_subcommand("build-dataset", "Rank every set directory under --sets");
  build->add_option("--sets", c.sets, "Directory of set directories")->required();
  build->add_option("--out", c.output, "Triplet JSONL output")->required();
  build->add_option("--jobs", c.jobs, "Worker threads");
  add_sampling(build);
  add_masking(build);
  add_geometry(build);

  auto* train = app.add_subcommand("train-toy", "Train the toy policy with masked DPO");
  train->add_option("--dataset", c.dataset, "Triplet JSONL")->required();
  train->add_option("--beta", c.beta, "Preference sharpness");
  train->add_option("--lr", c.lr, "Gradient descent step size");
  train->add_option("--steps", c.steps, "Number of updates");
  train->add_option("--seed", c.seed, "Reference policy seed");
  train->add_option("--trace", c.trace, "Per-step CSV trace");
  train->add_option("--order", c.order, "Context order of the toy policy");
  train->add_option("--form", c.form, "Masked ratio form: l1 or token");
  train->add_flag("--global", c.global, "Ignore masks (sequence-level DPO baseline)");
  train->add_option("--checkpoint", c.checkpoint, "Write trained policy JSON");
  train->add_option("--out", c.output, "Write summary JSON here instead of stdout");
  train->add_option("--jobs", c.jobs, "Worker threads");

  auto* report = app.add_subcommand("report", "Aggregate metric report JSONs into a table");
  report->add_option("dir", c.reports, "Directory of report JSON files")->required();
  report->add_option("--out", c.output, "Write summary JSON");

  auto* synth = app.add_subcommand("synth", "Write a synthetic candidate set");
  synth->add_option("--out", c.output, "Output directory")->required();
  synth->add_option("--mesh", c.mesh, "Seed mesh OBJ (default: subdivided box)");
  synth->add_option("--grid", c.grid, "Subdivisions per box face");
  synth->add_option("--count", c.count, "Number of candidates");
  add_sampling(synth);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    validate(c);
    if (score->parsed()) return cmd_score(c, out);
    if (mask->parsed()) return cmd_mask(c, out);
    if (rank->parsed()) return cmd_rank(c, out, err);
    if (build->parsed()) return cmd_build_dataset(c, out, err);
    if (train->parsed()) return cmd_train_toy(c, out);
    if (report->parsed()) return cmd_report(c, out);
    if (synth->parsed()) return cmd_synth(c, out);
  } catch (const DegenerateGeometryError& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace meshrft::cli
