#include "meshrft/toy_policy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "meshrft/errors.hpp"
#include "meshrft/sampling.hpp"

namespace meshrft {

ToyPolicy::ToyPolicy(std::size_t order, std::size_t vocab, std::size_t conditions)
    : order_(order), vocab_(vocab), conditions_(conditions) {
  if (vocab == 0 || conditions == 0) {
    throw InputError("toy policy needs a nonempty vocabulary and at least one condition");
  }
  contexts_ = 1;
  for (std::size_t i = 0; i < order; ++i) contexts_ *= vocab + 1;
  logits_.assign(conditions_ * contexts_ * vocab_, 0.0);
}

ToyPolicy ToyPolicy::random(std::size_t order, std::size_t vocab, std::size_t conditions,
                            std::uint64_t seed, double scale) {
  ToyPolicy p(order, vocab, conditions);
  std::mt19937_64 rng(seed);
  for (double& l : p.logits_) l = scale * (2.0 * unit_uniform(rng) - 1.0);
  return p;
}

std::size_t ToyPolicy::row_index(std::size_t condition, std::span<const Token> tokens,
                                 std::size_t pos) const {
  std::size_t ctx = 0;
  for (std::size_t i = 1; i <= order_; ++i) {
    const Token prev = pos >= i ? tokens[pos - i] : pad();
    ctx = ctx * (vocab_ + 1) + prev;
  }
  return condition * contexts_ + ctx;
}

void ToyPolicy::row_softmax(std::size_t r, std::span<double> out) const {
  const auto l = row(r);
  const double top = *std::max_element(l.begin(), l.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < vocab_; ++j) {
    out[j] = std::exp(l[j] - top);
    sum += out[j];
  }
  for (std::size_t j = 0; j < vocab_; ++j) out[j] /= sum;
}

std::span<const double> SoftmaxCache::row(std::size_t r) {
  auto [it, inserted] = rows_.try_emplace(r);
  if (inserted) {
    it->second.resize(policy_->vocab());
    policy_->row_softmax(r, it->second);
  }
  return it->second;
}

TokenProbs score_sequence(const ToyPolicy& policy, std::size_t condition,
                          std::span<const Token> tokens, ModelRole role) {
  SoftmaxCache cache(policy);
  return score_sequence(cache, policy, condition, tokens, role);
}

TokenProbs score_sequence(SoftmaxCache& cache, const ToyPolicy& policy, std::size_t condition,
                          std::span<const Token> tokens, ModelRole role) {
  if (tokens.empty()) throw LengthError("cannot score an empty sequence");
  if (condition >= policy.conditions()) {
    throw InputError("conditioning id " + std::to_string(condition) + " out of range");
  }
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t] >= policy.vocab()) {
      throw VocabularyError("token " + std::to_string(tokens[t]) + " at position " +
                            std::to_string(t) + " exceeds policy vocabulary " +
                            std::to_string(policy.vocab()));
    }
  }
  TokenProbs out;
  out.role = role;
  out.probs.reserve(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    out.probs.push_back(cache.row(policy.row_index(condition, tokens, t))[tokens[t]]);
  }
  return out;
}

}  // namespace meshrft
