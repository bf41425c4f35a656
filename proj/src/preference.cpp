#include "meshrft/preference.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "meshrft/errors.hpp"

namespace meshrft {

bool dominates(const MetricReport& a, const MetricReport& b) {
  return a.ber < b.ber && a.ts > b.ts && *a.hd < *b.hd;
}

std::vector<PreferenceTriplet> rank_pairs(const CandidateSet& set) {
  for (const Candidate& c : set.candidates) {
    if (!c.report || !c.report->hd) {
      throw MissingMetricError("candidate '" + c.id + "' in set '" + set.id +
                               "' has no complete metric report");
    }
  }
  std::vector<std::size_t> order(set.candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return set.candidates[a].id < set.candidates[b].id;
  });

  std::vector<PreferenceTriplet> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const std::size_t a = order[i], b = order[j];
      const MetricReport& ra = *set.candidates[a].report;
      const MetricReport& rb = *set.candidates[b].report;
      std::size_t pos = 0, neg = 0;
      if (dominates(ra, rb)) {
        pos = a;
        neg = b;
      } else if (dominates(rb, ra)) {
        pos = b;
        neg = a;
      } else {
        continue;
      }
      const MetricReport& rp = *set.candidates[pos].report;
      const MetricReport& rn = *set.candidates[neg].report;
      out.push_back({set.id, pos, neg, rn.ber - rp.ber, rp.ts - rn.ts, *rn.hd - *rp.hd});
    }
  }
  return out;
}

bool preference_relation_is_acyclic(std::span<const PreferenceTriplet> triplets,
                                    std::size_t candidate_count) {
  std::vector<std::vector<std::size_t>> succ(candidate_count);
  for (const auto& t : triplets) {
    if (t.positive >= candidate_count || t.negative >= candidate_count) return false;
    succ[t.positive].push_back(t.negative);
  }
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(candidate_count, 0);
  std::function<bool(std::size_t)> visit = [&](std::size_t v) {
    state[v] = 1;
    for (std::size_t w : succ[v]) {
      if (state[w] == 1) return false;
      if (state[w] == 0 && !visit(w)) return false;
    }
    state[v] = 2;
    return true;
  };
  for (std::size_t v = 0; v < candidate_count; ++v) {
    if (state[v] == 0 && !visit(v)) return false;
  }
  return true;
}

void evaluate_set(CandidateSet& set, const EvaluationOptions& opts) {
  for (Candidate& c : set.candidates) {
    if (!c.report || !c.report->hd) c.report = evaluate_candidate(c.mesh, set.point_cloud, opts);
  }
}

}  // namespace meshrft
