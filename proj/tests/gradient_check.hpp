#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <limits>
#include <set>
#include <span>
#include <vector>

#include "meshrft/mdpo.hpp"
#include "meshrft/toy_policy.hpp"

namespace meshrft::testing {

struct GradientCase {
  ToyPolicy policy;
  ToyPolicy reference;
  PreferenceExample example;
  MdpoConfig cfg;
};

/// Random policy pair, sequences and masks with V <= 32 and length <= 90.
inline GradientCase random_gradient_case(std::mt19937_64& rng) {
  auto uniform_int = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t vocab = uniform_int(2, 32);
  const std::size_t order = uniform_int(1, 2);
  const std::size_t conditions = uniform_int(1, 3);

  GradientCase c;
  c.reference = ToyPolicy::random(order, vocab, conditions, rng());
  c.policy = c.reference;
  std::normal_distribution<double> shift(0.0, 0.7);
  for (double& x : c.policy.logits()) x += shift(rng);

  auto sequence = [&](std::vector<Token>& tokens, std::vector<std::uint8_t>& mask) {
    const std::size_t len = uniform_int(1, 90);
    const double density = unit(rng) < 0.1 ? static_cast<double>(uniform_int(0, 1)) : unit(rng);
    for (std::size_t i = 0; i < len; ++i) {
      tokens.push_back(static_cast<Token>(uniform_int(0, vocab - 1)));
      mask.push_back(unit(rng) < density ? 1 : 0);
    }
  };
  c.example.condition = uniform_int(0, conditions - 1);
  sequence(c.example.pos_tokens, c.example.pos_mask);
  sequence(c.example.neg_tokens, c.example.neg_mask);

  c.cfg.beta = 0.1 + 1.9 * unit(rng);
  c.cfg.form = unit(rng) < 0.75 ? RatioForm::l1_ratio : RatioForm::token_log_ratio;
  c.cfg.global_masks = unit(rng) < 0.15;
  return c;
}

/// Loss from the logit table in extended precision: per-position softmax,
/// masked sums, log-sigmoid of the margin. Single logits can be overridden
/// without rescoring rows they do not belong to.
class OracleLoss {
 public:
  using R = long double;

  OracleLoss(const ToyPolicy& policy, const ToyPolicy& reference, const PreferenceExample& ex,
             const MdpoConfig& cfg)
      : policy_(policy), cfg_(cfg) {
    pos_ = side(policy, reference, ex.condition, ex.pos_tokens, ex.pos_mask, true);
    neg_ = side(policy, reference, ex.condition, ex.neg_tokens, ex.neg_mask, false);
  }

  R loss() const { return combine(pos_, neg_, std::numeric_limits<std::size_t>::max(), {}); }

  /// Loss with logit `index` replaced by `value`.
  R loss_with(std::size_t index, double value) const {
    const std::size_t vocab = policy_.vocab();
    const std::size_t row = index / vocab;
    std::vector<double> logits(policy_.row(row).begin(), policy_.row(row).end());
    logits[index % vocab] = value;
    return combine(pos_, neg_, row, softmax(logits));
  }

 private:
  struct Side {
    std::vector<std::size_t> rows;
    std::vector<Token> tokens;
    std::vector<R> mask, p_policy, p_ref;
  };

  static std::vector<R> softmax(std::span<const double> logits) {
    const R m = *std::max_element(logits.begin(), logits.end());
    std::vector<R> out(logits.size());
    R z = 0.0L;
    for (std::size_t j = 0; j < logits.size(); ++j) z += out[j] = std::exp(static_cast<R>(logits[j]) - m);
    for (R& x : out) x /= z;
    return out;
  }

  Side side(const ToyPolicy& policy, const ToyPolicy& reference, std::size_t cond,
            const std::vector<Token>& tokens, const std::vector<std::uint8_t>& phi, bool positive) const {
    Side s;
    s.tokens = tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::size_t r = policy.row_index(cond, tokens, i);
      s.rows.push_back(r);
      s.mask.push_back(cfg_.global_masks ? 1.0L : positive ? R(phi[i]) : 1.0L - phi[i]);
      s.p_policy.push_back(softmax(policy.row(r))[tokens[i]]);
      s.p_ref.push_back(softmax(reference.row(r))[tokens[i]]);
    }
    return s;
  }

  R term(const Side& s, std::size_t row, const std::vector<R>& dist) const {
    R sp = 0.0L, sr = 0.0L, logs = 0.0L;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const R pp = s.rows[i] == row ? dist[s.tokens[i]] : s.p_policy[i];
      sp += s.mask[i] * pp;
      sr += s.mask[i] * s.p_ref[i];
      logs += s.mask[i] * (std::log(pp) - std::log(s.p_ref[i]));
    }
    if (cfg_.form == RatioForm::token_log_ratio) return logs;
    const R eps = cfg_.eps_floor;
    if (sp < eps && sr < eps) return 0.0L;
    return std::log(std::max(sp, eps)) - std::log(std::max(sr, eps));
  }

  R combine(const Side& pos, const Side& neg, std::size_t row, const std::vector<R>& dist) const {
    const R z = cfg_.beta * (term(pos, row, dist) - term(neg, row, dist));
    return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  }

  const ToyPolicy& policy_;
  MdpoConfig cfg_;
  Side pos_, neg_;
};

inline double oracle_loss(const ToyPolicy& policy, const ToyPolicy& reference,
                          const PreferenceExample& ex, const MdpoConfig& cfg) {
  return static_cast<double>(OracleLoss(policy, reference, ex, cfg).loss());
}

/// Every logit of every context row either sequence visits.
inline std::vector<std::size_t> touched_logits(const ToyPolicy& policy, const PreferenceExample& ex) {
  std::set<std::size_t> rows;
  for (std::size_t i = 0; i < ex.pos_tokens.size(); ++i)
    rows.insert(policy.row_index(ex.condition, ex.pos_tokens, i));
  for (std::size_t i = 0; i < ex.neg_tokens.size(); ++i)
    rows.insert(policy.row_index(ex.condition, ex.neg_tokens, i));
  std::vector<std::size_t> out;
  for (std::size_t r : rows)
    for (std::size_t v = 0; v < policy.vocab(); ++v) out.push_back(r * policy.vocab() + v);
  return out;
}

inline constexpr double kFiniteDifferenceStep = 1e-5;
/// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
inline constexpr double kRelativeErrorFloor = 1e-6;

struct GradientCheck {
  double max_relative = 0.0;
  double max_absolute = 0.0;
  std::size_t checked = 0;
  bool untouched_exactly_zero = true;
};

inline GradientCheck check_gradient(const GradientCase& c) {
  const LossGradient g = mdpo_gradient(c.policy, c.reference, c.example, c.cfg);
  const auto touched = touched_logits(c.policy, c.example);
  GradientCheck out;
  const OracleLoss oracle(c.policy, c.reference, c.example, c.cfg);
  const double h = kFiniteDifferenceStep;
  for (std::size_t idx : touched) {
    const double x0 = c.policy.logits()[idx];
    const double hi = x0 + h, lo = x0 - h;
    const long double up = oracle.loss_with(idx, hi);
    const long double down = oracle.loss_with(idx, lo);
    const double numeric = static_cast<double>((up - down) / (static_cast<long double>(hi) - lo));
    const double err = std::abs(g.gradient[idx] - numeric);
    const double scale = std::max({std::abs(g.gradient[idx]), std::abs(numeric), kRelativeErrorFloor});
    out.max_absolute = std::max(out.max_absolute, err);
    out.max_relative = std::max(out.max_relative, err / scale);
    ++out.checked;
  }
  std::vector<bool> is_touched(g.gradient.size(), false);
  for (std::size_t idx : touched) is_touched[idx] = true;
  for (std::size_t i = 0; i < g.gradient.size(); ++i) {
    if (!is_touched[i] && g.gradient[i] != 0.0) out.untouched_exactly_zero = false;
  }
  return out;
}

}  // namespace meshrft::testing
