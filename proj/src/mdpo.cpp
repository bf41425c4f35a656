#include "meshrft/mdpo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "meshrft/errors.hpp"

namespace meshrft {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double effective_mask(std::uint8_t phi, Polarity polarity) {
  return polarity == Polarity::positive ? static_cast<double>(phi)
                                        : 1.0 - static_cast<double>(phi);
}

void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) {
    throw LengthError("policy, reference and mask lengths differ (" + std::to_string(a) + ", " +
                      std::to_string(b) + ", " + std::to_string(c) + ")");
  }
}

std::vector<std::uint8_t> effective_phi(const std::vector<std::uint8_t>& phi, Polarity polarity,
                                        bool global) {
  if (!global) return phi;
  // S-DPO: phi = 1 everywhere on M+, and 1 - phi = 1 everywhere on M-
  return std::vector<std::uint8_t>(phi.size(), polarity == Polarity::positive ? 1 : 0);
}

// Adds scale * dL/dlogits for one side of the triplet into `grad`.
void accumulate_side(const ToyPolicy& policy, SoftmaxCache& cache, std::size_t condition, std::span<const Token> tokens,
                     std::span<const double> p_policy, std::span<const double> p_ref,
                     std::span<const std::uint8_t> phi, Polarity polarity, const MdpoConfig& cfg,
                     double scale, std::span<double> grad) {
  const std::size_t n = tokens.size();
  // coefficient of d p_t (l1 form) or d log p_t (token form)
  std::vector<double> coef(n, 0.0);
  if (cfg.form == RatioForm::l1_ratio) {
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      num += effective_mask(phi[t], polarity) * p_policy[t];
      den += effective_mask(phi[t], polarity) * p_ref[t];
    }
    if (num < cfg.eps_floor && den < cfg.eps_floor) return;
    if (!(num > cfg.eps_floor)) return;  // floored numerator is constant
    for (std::size_t t = 0; t < n; ++t) {
      coef[t] = effective_mask(phi[t], polarity) * p_policy[t] / num;
    }
  } else {
    for (std::size_t t = 0; t < n; ++t) {
      if (p_policy[t] > cfg.eps_floor) coef[t] = effective_mask(phi[t], polarity);
    }
  }

  const std::size_t vocab = policy.vocab();
  for (std::size_t t = 0; t < n; ++t) {
    if (coef[t] == 0.0) continue;
    const std::size_t r = policy.row_index(condition, tokens, t);
    const auto dist = cache.row(r);
    // d log p_t / d logit_j = [j == y_t] - softmax_j
    const double c = scale * coef[t];
    double* g = grad.data() + r * vocab;
    for (std::size_t j = 0; j < vocab; ++j) g[j] -= c * dist[j];
    g[tokens[t]] += c;
  }
}

}  // namespace

void MdpoConfig::validate() const {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  if (!(eps_floor > 0.0)) throw InputError("eps_floor must be positive");
  if (!(learning_rate >= 0.0)) throw InputError("learning rate must be non-negative");
  if (jobs == 0) throw InputError("jobs must be at least 1");
}

double masked_log_ratio(std::span<const double> p_policy, std::span<const double> p_ref,
                        std::span<const std::uint8_t> mask, Polarity polarity, double eps,
                        RatioForm form) {
  check_lengths(p_policy.size(), p_ref.size(), mask.size());
  if (form == RatioForm::token_log_ratio) {
    double sum = 0.0;
    for (std::size_t t = 0; t < mask.size(); ++t) {
      const double m = effective_mask(mask[t], polarity);
      if (m == 0.0) continue;
      sum += m * (std::log(std::max(p_policy[t], eps)) - std::log(std::max(p_ref[t], eps)));
    }
    return sum;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    const double m = effective_mask(mask[t], polarity);
    num += m * p_policy[t];
    den += m * p_ref[t];
  }
  if (num < eps && den < eps) return 0.0;
  return std::log(std::max(num, eps) / std::max(den, eps));
}

ScoredTriplet score_triplet(const ToyPolicy& policy, const ToyPolicy& reference,
                            const PreferenceExample& ex) {
  SoftmaxCache cache(policy);
  SoftmaxCache ref_cache(reference);
  ScoredTriplet s;
  s.pos_policy = score_sequence(cache, policy, ex.condition, ex.pos_tokens, ModelRole::policy);
  s.pos_ref = score_sequence(ref_cache, reference, ex.condition, ex.pos_tokens, ModelRole::reference);
  s.neg_policy = score_sequence(cache, policy, ex.condition, ex.neg_tokens, ModelRole::policy);
  s.neg_ref = score_sequence(ref_cache, reference, ex.condition, ex.neg_tokens, ModelRole::reference);
  s.pos_mask = ex.pos_mask;
  s.neg_mask = ex.neg_mask;
  return s;
}

double mdpo_loss_from_terms(double l_pos, double l_neg, double beta) {
  const double z = beta * (l_pos - l_neg);
  // -log sigmoid(z) = softplus(-z)
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double mdpo_loss(const ScoredTriplet& s, const MdpoConfig& cfg) {
  const auto pos_phi = effective_phi(s.pos_mask, Polarity::positive, cfg.global_masks);
  const auto neg_phi = effective_phi(s.neg_mask, Polarity::negative, cfg.global_masks);
  const double l_pos = masked_log_ratio(s.pos_policy.probs, s.pos_ref.probs, pos_phi,
                                        Polarity::positive, cfg.eps_floor, cfg.form);
  const double l_neg = masked_log_ratio(s.neg_policy.probs, s.neg_ref.probs, neg_phi,
                                        Polarity::negative, cfg.eps_floor, cfg.form);
  return mdpo_loss_from_terms(l_pos, l_neg, cfg.beta);
}

double mdpo_loss(const ToyPolicy& policy, const ToyPolicy& reference,
                 const PreferenceExample& example, const MdpoConfig& cfg) {
  return mdpo_loss(score_triplet(policy, reference, example), cfg);
}

LossGradient mdpo_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                           const PreferenceExample& ex, const MdpoConfig& cfg) {
  SoftmaxCache cache(policy);
  SoftmaxCache ref_cache(reference);
  ScoredTriplet s;
  s.pos_policy = score_sequence(cache, policy, ex.condition, ex.pos_tokens, ModelRole::policy);
  s.pos_ref = score_sequence(ref_cache, reference, ex.condition, ex.pos_tokens, ModelRole::reference);
  s.neg_policy = score_sequence(cache, policy, ex.condition, ex.neg_tokens, ModelRole::policy);
  s.neg_ref = score_sequence(ref_cache, reference, ex.condition, ex.neg_tokens, ModelRole::reference);
  s.pos_mask = ex.pos_mask;
  s.neg_mask = ex.neg_mask;
  const auto pos_phi = effective_phi(s.pos_mask, Polarity::positive, cfg.global_masks);
  const auto neg_phi = effective_phi(s.neg_mask, Polarity::negative, cfg.global_masks);
  const double l_pos = masked_log_ratio(s.pos_policy.probs, s.pos_ref.probs, pos_phi,
                                        Polarity::positive, cfg.eps_floor, cfg.form);
  const double l_neg = masked_log_ratio(s.neg_policy.probs, s.neg_ref.probs, neg_phi,
                                        Polarity::negative, cfg.eps_floor, cfg.form);

  LossGradient out;
  out.margin = cfg.beta * (l_pos - l_neg);
  out.loss = mdpo_loss_from_terms(l_pos, l_neg, cfg.beta);
  out.gradient.assign(policy.logits().size(), 0.0);

  // d loss / d z = -sigmoid(-z), z = beta * (L+ - L-)
  const double dz = -sigmoid(-out.margin) * cfg.beta;
  accumulate_side(policy, cache, ex.condition, ex.pos_tokens, s.pos_policy.probs, s.pos_ref.probs, pos_phi,
                  Polarity::positive, cfg, dz, out.gradient);
  accumulate_side(policy, cache, ex.condition, ex.neg_tokens, s.neg_policy.probs, s.neg_ref.probs, neg_phi,
                  Polarity::negative, cfg, -dz, out.gradient);
  return out;
}

LossGradient mdpo_batch_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                                 std::span<const PreferenceExample> batch,
                                 const MdpoConfig& cfg) {
  if (batch.empty()) throw InputError("empty preference batch");
  std::vector<LossGradient> parts(batch.size());
  const std::size_t workers = std::min(cfg.jobs, batch.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      parts[i] = mdpo_gradient(policy, reference, batch[i], cfg);
    }
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < batch.size(); i += workers) {
            parts[i] = mdpo_gradient(policy, reference, batch[i], cfg);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // fixed reduction order keeps results independent of the worker count
  LossGradient out;
  out.gradient.assign(policy.logits().size(), 0.0);
  for (const LossGradient& p : parts) {
    out.loss += p.loss;
    out.margin += p.margin;
    for (std::size_t j = 0; j < out.gradient.size(); ++j) out.gradient[j] += p.gradient[j];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  out.margin *= inv;
  for (double& g : out.gradient) g *= inv;
  return out;
}

double mdpo_batch_loss(const ToyPolicy& policy, const ToyPolicy& reference,
                       std::span<const PreferenceExample> batch, const MdpoConfig& cfg) {
  if (batch.empty()) throw InputError("empty preference batch");
  double sum = 0.0;
  for (const auto& ex : batch) sum += mdpo_loss(policy, reference, ex, cfg);
  return sum / static_cast<double>(batch.size());
}

double masked_positive_mass(const ToyPolicy& policy, std::span<const PreferenceExample> batch) {
  double mass = 0.0;
  for (const auto& ex : batch) {
    const TokenProbs p = score_sequence(policy, ex.condition, ex.pos_tokens);
    for (std::size_t t = 0; t < p.probs.size(); ++t) mass += ex.pos_mask[t] * p.probs[t];
  }
  return mass;
}

TrainingResult train_toy(const ToyPolicy& reference, std::span<const PreferenceExample> dataset,
                         const MdpoConfig& cfg) {
  cfg.validate();
  if (dataset.empty()) throw InputError("training needs a nonempty dataset");
  TrainingResult result;
  result.policy = reference;
  result.trace.reserve(cfg.steps + 1);
  for (std::size_t step = 0; step <= cfg.steps; ++step) {
    LossGradient lg = mdpo_batch_gradient(result.policy, reference, dataset, cfg);
    if (!std::isfinite(lg.loss)) throw DivergenceError(step);
    double sq = 0.0;
    for (double g : lg.gradient) sq += g * g;
    result.trace.push_back({step, lg.loss, lg.margin, std::sqrt(sq)});
    if (step == cfg.steps) break;
    auto logits = result.policy.logits();
    for (std::size_t j = 0; j < logits.size(); ++j) logits[j] -= cfg.learning_rate * lg.gradient[j];
  }
  return result;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
  out << "step,loss,margin,grad_norm\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const TraceRow& r : trace) {
    out << r.step << ',' << r.loss << ',' << r.margin << ',' << r.grad_norm << '\n';
  }
}

}  // namespace meshrft
