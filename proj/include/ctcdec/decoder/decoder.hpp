// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "ctcdec/core/ctc.hpp"
#include "ctcdec/core/lattice.hpp"
#include "ctcdec/lm/bilm.hpp"
#include "ctcdec/lm/ngram.hpp"

namespace ctcdec {

struct DecodeParams {
  std::size_t beam_width = 20;
  double lm_weight = 1.0;      // alpha
  double length_reward = 2.0;  // beta, added once per emitted label
  /// Hypotheses scoring below (best - |beam_threshold|) are dropped after
  /// merging. Infinity disables threshold pruning.
  double beam_threshold = 20.0;
  std::size_t future_shift = 0;  // tau
  double lambda = 0.5;           // forward weight in the bidirectional fusion

  static constexpr double kNoThreshold = std::numeric_limits<double>::infinity();

  void Validate() const;
};

struct NBestEntry {
  Transcript labels;
  double score = 0.0;       // fused log-score
  double am_score = 0.0;    // log P_ctc(labels | x) over the surviving alignments
  double lm_score = 0.0;    // score - am_score - length_reward
  double length_reward = 0.0;
};

struct NBestList {
  enum class Mode { kGreedy, kUnidirectional, kBidirectional };
  Mode mode = Mode::kUnidirectional;
  DecodeParams params;
  std::vector<NBestEntry> entries;  // best first, at most beam_width
  /// Backward-model Advance calls issued by this decode (bidirectional only).
  std::size_t backward_advances = 0;
};

/// Backward-model states over a greedy transcript y* of length T_y.
/// states[i] has the context y*_i, y*_{i+1}, ... followed by </s>;
/// states[T_y] is the start state. Built right to left with exactly T_y
/// Advance calls.
class BackwardStateCache {
 public:
  BackwardStateCache(const NGramLM& backward, const Transcript& greedy);

  std::size_t size() const { return states_.size(); }
  const LMState& at(std::size_t i) const { return states_.at(i); }
  const LMState& empty() const { return empty_; }

  /// State for a label whose next greedy label sits at transcript index
  /// `next_label` (kNoLabel = none left): states[next_label + shift], or the
  /// empty-context state once that runs past states[T_y].
  const LMState& ForFuture(std::size_t next_label, std::size_t shift) const;
  /// Index into states for the same lookup, or kNoLabel for the empty state.
  std::size_t IndexFor(std::size_t next_label, std::size_t shift) const;

 private:
  std::vector<LMState> states_;
  LMState empty_;
};

/// Transcript index of the label emitted by the earliest frame after `t`
/// (repeat frames emit nothing), or kNoLabel when no later frame emits.
std::size_t NextNonblankLabel(const GreedyResult& greedy, std::size_t t);

/// Beam search with shallow fusion of a forward LM: each emitted label c
/// scores lm_weight * log p_fwd(c | prefix) + length_reward.
NBestList DecodeUnidirectional(const PosteriorLattice& lattice, const NGramLM& forward,
                               const DecodeParams& params);

/// Beam search with the bidirectional LM. The greedy transcript supplies the
/// future context: at frame t the backward state is the cached state for the
/// next greedy label after t, shifted by tau. The combiner provides the two
/// models; params.lambda sets the fusion weight.
NBestList DecodeBidirectional(const PosteriorLattice& lattice, const BiLMCombiner& bilm,
                              const DecodeParams& params);

/// Greedy decoding wrapped as a one-entry n-best list.
NBestList DecodeGreedy(const PosteriorLattice& lattice, const Alphabet& alphabet);

/// One line per hypothesis: rank, score, AM log-prob, LM score, text
/// (tab-separated).
void WriteNBest(std::ostream& out, const NBestList& nbest, const Alphabet& alphabet);

}  // namespace ctcdec
