// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/lm/bilm.hpp"

#include <cmath>

#include "ctcdec/error.hpp"
#include "ctcdec/log_math.hpp"

namespace ctcdec {

BiLMCombiner::BiLMCombiner(std::shared_ptr<const NGramLM> forward,
                           std::shared_ptr<const NGramLM> backward, double lambda)
    : forward_(std::move(forward)), backward_(std::move(backward)), lambda_(lambda) {
  if (!forward_ || !backward_) throw DomainError("bilm: null model");
  if (forward_->direction() != Direction::kForward) {
    throw DomainError("bilm: first model must be a forward model");
  }
  if (backward_->direction() != Direction::kBackward) {
    throw DomainError("bilm: second model must be a backward model");
  }
  if (!(forward_->alphabet() == backward_->alphabet())) {
    throw DomainError("bilm: forward and backward models use different alphabets");
  }
  if (!(lambda_ >= 0.0 && lambda_ <= 1.0)) throw DomainError("bilm: lambda must lie in [0, 1]");
}

std::vector<double> BiLMCombiner::Combine(const LMState& fwd_state,
                                          const LMState& bwd_state) const {
  if (lambda_ == 1.0) return forward_->Predict(fwd_state);
  if (lambda_ == 0.0) return backward_->Predict(bwd_state);
  return Combine(forward_->Predict(fwd_state), backward_->Predict(bwd_state), lambda_);
}

std::vector<double> BiLMCombiner::Combine(std::span<const double> fwd,
                                          std::span<const double> bwd, double lambda) {
  if (fwd.size() != bwd.size()) throw DomainError("bilm: distribution sizes differ");
  if (lambda == 1.0) return {fwd.begin(), fwd.end()};
  if (lambda == 0.0) return {bwd.begin(), bwd.end()};
  std::vector<double> out(fwd.size(), kLogZero);
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    if (fwd[i] == kLogZero || bwd[i] == kLogZero) continue;
    out[i] = lambda * fwd[i] + (1.0 - lambda) * bwd[i];
  }
  const double z = LogSumExp(out);
  for (double& v : out) {
    if (v != kLogZero) v -= z;
  }
  return out;
}

LMState ShiftedFutureState(const NGramLM& backward, std::span<const TokenId> sentence,
                           std::size_t t) {
  const std::size_t start = t + 1 + backward.shift();
  if (start > sentence.size()) return backward.EmptyState();
  return backward.StateFor(sentence.subspan(start));
}

namespace {

double FinishPerplexity(double log_sum, std::size_t count) {
  return std::exp(-log_sum / static_cast<double>(count));
}

}  // namespace

double Perplexity(const NGramLM& lm, std::span<const Transcript> corpus) {
  if (corpus.empty()) throw DomainError("perplexity: empty corpus");
  const TokenId eos = lm.alphabet().eos_id();
  double log_sum = 0.0;
  std::size_t count = 0;
  for (const auto& sentence : corpus) {
    std::span<const TokenId> y(sentence.labels);
    for (std::size_t t = 0; t <= y.size(); ++t) {
      const LMState state = lm.direction() == Direction::kForward
                                ? lm.StateFor(y.first(t))
                                : ShiftedFutureState(lm, y, t);
      log_sum += lm.LogProb(state, t < y.size() ? y[t] : eos);
      ++count;
    }
  }
  return FinishPerplexity(log_sum, count);
}

double Perplexity(const BiLMCombiner& bilm, std::span<const Transcript> corpus,
                  const FutureContext& future) {
  if (corpus.empty()) throw DomainError("perplexity: empty corpus");
  const NGramLM& fwd = bilm.forward();
  const NGramLM& bwd = bilm.backward();
  const TokenId eos = fwd.alphabet().eos_id();
  double log_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::span<const TokenId> y(corpus[i].labels);
    std::optional<AugmentedPair> noisy;
    if (future.kind == FutureContext::Kind::kNoisy) {
      noisy = AugmentSentence(corpus[i], i, bwd.shift(), future.noise, fwd.alphabet());
    }
    for (std::size_t t = 0; t <= y.size(); ++t) {
      LMState bwd_state = bwd.EmptyState();
      if (!noisy) {
        bwd_state = ShiftedFutureState(bwd, y, t);
      } else if (t < y.size() && noisy->alignment_map[t] != kFutureEnd) {
        std::span<const TokenId> stream(noisy->noisy_future.labels);
        bwd_state = bwd.StateFor(stream.subspan(noisy->alignment_map[t]));
      }
      const auto dist = bilm.Combine(fwd.StateFor(y.first(t)), bwd_state);
      log_sum += dist[static_cast<std::size_t>(t < y.size() ? y[t] : eos)];
      ++count;
    }
  }
  return FinishPerplexity(log_sum, count);
}

}  // namespace ctcdec
