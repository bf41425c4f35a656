#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "meshrft/tokenizer.hpp"

namespace meshrft {

/// k-th order categorical autoregressive model: one row of `vocab` logits
/// per (conditioning id, previous-k-token context). Positions before the
/// start of the sequence are padded with the id `vocab`.
class ToyPolicy {
 public:
  ToyPolicy() = default;
  ToyPolicy(std::size_t order, std::size_t vocab, std::size_t conditions);

  /// Logits drawn uniformly from [-scale, scale].
  static ToyPolicy random(std::size_t order, std::size_t vocab, std::size_t conditions,
                          std::uint64_t seed, double scale = 0.5);

  std::size_t order() const noexcept { return order_; }
  std::size_t vocab() const noexcept { return vocab_; }
  std::size_t conditions() const noexcept { return conditions_; }
  std::size_t contexts_per_condition() const noexcept { return contexts_; }
  std::size_t rows() const noexcept { return conditions_ * contexts_; }
  Token pad() const noexcept { return static_cast<Token>(vocab_); }

  /// Row used to predict tokens[pos].
  std::size_t row_index(std::size_t condition, std::span<const Token> tokens,
                        std::size_t pos) const;

  std::span<double> logits() noexcept { return logits_; }
  std::span<const double> logits() const noexcept { return logits_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(logits_).subspan(r * vocab_, vocab_);
  }

  /// Numerically stable softmax of one row.
  void row_softmax(std::size_t r, std::span<double> out) const;

 private:
  std::size_t order_ = 1;
  std::size_t vocab_ = 32;
  std::size_t conditions_ = 1;
  std::size_t contexts_ = 33;
  std::vector<double> logits_;
};

/// Softmax rows of one policy, computed on first use. Not thread-safe;
/// invalid once the policy's logits change.
class SoftmaxCache {
 public:
  explicit SoftmaxCache(const ToyPolicy& policy) : policy_(&policy) {}

  std::span<const double> row(std::size_t r);

 private:
  const ToyPolicy* policy_;
  std::unordered_map<std::size_t, std::vector<double>> rows_;
};

enum class ModelRole { policy, reference };

struct TokenProbs {
  std::vector<double> probs;  ///< probability of the realized token per position
  ModelRole role = ModelRole::policy;
};

/// Probability of each realized token given its context and the conditioning
/// id. Throws VocabularyError for tokens >= vocab, LengthError when empty.
TokenProbs score_sequence(const ToyPolicy& policy, std::size_t condition,
                          std::span<const Token> tokens, ModelRole role = ModelRole::policy);
TokenProbs score_sequence(SoftmaxCache& cache, const ToyPolicy& policy, std::size_t condition,
                          std::span<const Token> tokens, ModelRole role = ModelRole::policy);

}  // namespace meshrft
