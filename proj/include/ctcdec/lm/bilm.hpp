// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ctcdec/augment/noise.hpp"
#include "ctcdec/lm/ngram.hpp"

namespace ctcdec {

/// Fuses a forward and a shifted backward model into one predictive
/// distribution over the next token.
///
/// A neural bidirectional LM sums the two directions' hidden states before a
/// shared output layer. Count-based models have no hidden state to add, so the
/// two predictive distributions are combined log-linearly instead:
///
///   log p(y) = lambda * log p_fwd(y) + (1 - lambda) * log p_bwd(y) - log Z
///
/// lambda = 1 returns the forward distribution unchanged and lambda = 0 the
/// backward one; no renormalization is applied at either boundary.
class BiLMCombiner {
 public:
  BiLMCombiner(std::shared_ptr<const NGramLM> forward, std::shared_ptr<const NGramLM> backward,
               double lambda = 0.5);

  const NGramLM& forward() const { return *forward_; }
  const NGramLM& backward() const { return *backward_; }
  double lambda() const { return lambda_; }

  std::vector<double> Combine(const LMState& fwd_state, const LMState& bwd_state) const;

  /// Same rule on precomputed distributions (entries at -inf in either input
  /// stay -inf).
  static std::vector<double> Combine(std::span<const double> fwd, std::span<const double> bwd,
                                     double lambda);

 private:
  std::shared_ptr<const NGramLM> forward_;
  std::shared_ptr<const NGramLM> backward_;
  double lambda_;
};

/// Where the backward model's future context comes from during evaluation.
struct FutureContext {
  enum class Kind { kClean, kNoisy };
  Kind kind = Kind::kClean;
  NoiseSpec noise;  // used when kind == kNoisy

  static FutureContext Clean() { return {}; }
  static FutureContext Noisy(NoiseSpec spec) { return {Kind::kNoisy, spec}; }
};

/// Character-level perplexity exp(-(1/N) sum log p), N counting every
/// sentence's tokens plus its </s>. Forward models condition on the history,
/// backward models on the clean shifted future. Throws DomainError on an
/// empty corpus.
double Perplexity(const NGramLM& lm, std::span<const Transcript> corpus);

/// Perplexity of the combined model. The future context is the true suffix
/// (clean) or a corrupted suffix aligned through the noise edit log (noisy),
/// shifted by the backward model's tau in both cases.
double Perplexity(const BiLMCombiner& bilm, std::span<const Transcript> corpus,
                  const FutureContext& future = FutureContext::Clean());

/// Backward-model state for clean position t of `sentence`: the context starts
/// at t+1+shift, or is empty past the end.
LMState ShiftedFutureState(const NGramLM& backward, std::span<const TokenId> sentence,
                           std::size_t t);

}  // namespace ctcdec
