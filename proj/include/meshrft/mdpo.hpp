#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "meshrft/toy_policy.hpp"

namespace meshrft {

enum class Polarity { positive, negative };

/// How a masked sequence is compared between policy and reference.
enum class RatioForm {
  /// log of the ratio of masked probability sums (the M-DPO objective)
  l1_ratio,
  /// sum over masked tokens of log p_policy - log p_ref (standard DPO)
  token_log_ratio,
};

struct MdpoConfig {
  double beta = 0.5;
  double eps_floor = 1e-12;
  double learning_rate = 0.1;
  std::size_t steps = 200;
  std::uint64_t seed = 0;
  RatioForm form = RatioForm::l1_ratio;
  /// Ignore quality masks: every token of M+ and of M- participates (S-DPO).
  bool global_masks = false;
  /// Worker threads for batch evaluation; results do not depend on it.
  std::size_t jobs = 1;

  void validate() const;
};

/// Masked comparison of one sequence. `mask` is the quality mask phi of the
/// mesh; the negative polarity uses 1 - phi. For the l1 form, masked sums are
/// floored at `eps`, and the result is exactly 0 when both sums fall below it.
double masked_log_ratio(std::span<const double> p_policy, std::span<const double> p_ref,
                        std::span<const std::uint8_t> mask, Polarity polarity, double eps,
                        RatioForm form = RatioForm::l1_ratio);

/// One preference example in token space; masks are phi (1 = good face).
struct PreferenceExample {
  std::size_t condition = 0;
  std::vector<Token> pos_tokens;
  std::vector<std::uint8_t> pos_mask;
  std::vector<Token> neg_tokens;
  std::vector<std::uint8_t> neg_mask;
};

struct ScoredTriplet {
  TokenProbs pos_policy;
  TokenProbs pos_ref;
  std::vector<std::uint8_t> pos_mask;
  TokenProbs neg_policy;
  TokenProbs neg_ref;
  std::vector<std::uint8_t> neg_mask;
};

ScoredTriplet score_triplet(const ToyPolicy& policy, const ToyPolicy& reference,
                            const PreferenceExample& example);

/// -log sigmoid(beta * (l_pos - l_neg)), evaluated without overflow.
double mdpo_loss_from_terms(double l_pos, double l_neg, double beta);

double mdpo_loss(const ScoredTriplet& triplet, const MdpoConfig& cfg);
double mdpo_loss(const ToyPolicy& policy, const ToyPolicy& reference,
                 const PreferenceExample& example, const MdpoConfig& cfg);

struct LossGradient {
  double loss = 0.0;
  double margin = 0.0;            ///< beta * (L+ - L-)
  std::vector<double> gradient;   ///< same layout as ToyPolicy::logits()
};

/// Exact gradient of the loss with respect to every policy logit. The
/// reference is treated as a constant.
LossGradient mdpo_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                           const PreferenceExample& example, const MdpoConfig& cfg);

/// Mean loss, margin and gradient over the batch, reduced in batch order.
LossGradient mdpo_batch_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                                 std::span<const PreferenceExample> batch, const MdpoConfig& cfg);

double mdpo_batch_loss(const ToyPolicy& policy, const ToyPolicy& reference,
                       std::span<const PreferenceExample> batch, const MdpoConfig& cfg);

/// Sum over positions of phi(M+) * p_policy, summed over the batch.
double masked_positive_mass(const ToyPolicy& policy, std::span<const PreferenceExample> batch);

struct TraceRow {
  std::size_t step = 0;
  double loss = 0.0;
  double margin = 0.0;
  double grad_norm = 0.0;
};

struct TrainingResult {
  ToyPolicy policy;
  std::vector<TraceRow> trace;  ///< steps + 1 rows; row s is measured before update s
};

/// Plain gradient descent starting from an exact copy of the reference.
/// Throws DivergenceError when the loss becomes non-finite.
TrainingResult train_toy(const ToyPolicy& reference, std::span<const PreferenceExample> dataset,
                         const MdpoConfig& cfg);

/// Columns: step, loss, margin, grad_norm.
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

}  // namespace meshrft
