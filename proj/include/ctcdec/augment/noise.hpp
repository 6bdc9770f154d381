// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ctcdec/core/alphabet.hpp"
#include "ctcdec/core/ctc.hpp"
#include "ctcdec/random.hpp"

namespace ctcdec {

enum class EditOp { kInsertion, kDeletion, kSubstitution };

/// Share of each corruption type among corrupted positions.
struct NoiseMix {
  double insertion = 0.45;
  double deletion = 0.20;
  double substitution = 0.35;

  /// Greedy-decoding error breakdown measured on test-clean.
  static NoiseMix TestCleanPreset() { return {0.456, 0.219, 0.325}; }
};

struct NoiseSpec {
  double epsilon = 0.05;
  NoiseMix mix;
  std::uint64_t seed = 0;
  /// Corrupt exactly round(epsilon * n) positions per sentence instead of
  /// independent Bernoulli(epsilon) draws.
  bool exact_count = false;

  /// Throws DomainError unless epsilon is in [0,1] and the mix is a
  /// distribution (non-negative, sums to 1 within 1e-9).
  void Validate() const;
};

/// One edit, in clean-sequence coordinates. For insertions `token` is the
/// inserted symbol (placed after `position`); for substitutions it is the
/// replacement; for deletions it is the removed symbol.
struct NoiseEdit {
  std::size_t position;
  EditOp op;
  TokenId token;
  bool operator==(const NoiseEdit&) const = default;
};

struct NoisyTranscript {
  Transcript noisy;
  std::vector<NoiseEdit> edits;  // sorted by position
};

/// Corrupts a clean transcript with insertion, deletion and substitution noise.
/// Substitutes draw uniformly from the other lexical tokens; inserts draw
/// uniformly from all lexical tokens. Needs at least two lexical tokens.
NoisyTranscript InjectNoise(const Transcript& clean, const NoiseSpec& spec,
                            const Alphabet& alphabet, Rng& rng);

/// Applies an edit log to the clean sequence.
Transcript ReplayEdits(const Transcript& clean, std::span<const NoiseEdit> edits);

inline constexpr std::size_t kFutureEnd = static_cast<std::size_t>(-1);

/// For each clean position j in [0, n], the index in the noisy sequence where
/// a context starting at clean j begins: the first noisy token whose origin is
/// at or after j. Survivors originate at their own position; a token inserted
/// after position i originates at i. Deleted positions therefore skip to the
/// next survivor. Entry n (and any j without a later token) maps to the noisy
/// length, i.e. the sentence end.
std::vector<std::size_t> NoisyStarts(std::size_t clean_length,
                                     std::span<const NoiseEdit> edits);

/// Backward-LM training record: the shifted future context for target
/// position t begins at noisy_future[alignment_map[t]]. A value equal to
/// noisy_future.size() means the context is only the sentence end;
/// kFutureEnd means the shifted future lies past the end entirely.
struct AugmentedPair {
  Transcript target;
  Transcript noisy_future;
  std::vector<std::size_t> alignment_map;
};

/// alignment_map[t] = NoisyStarts[t + 1 + shift], or kFutureEnd when
/// t + 1 + shift exceeds the clean length.
std::vector<std::size_t> AlignFuture(std::size_t clean_length,
                                     std::span<const NoiseEdit> edits,
                                     std::size_t shift);

/// Builds one record per sentence. Sentence i uses an RNG seeded with
/// MixSeed(spec.seed, i), so output does not depend on processing order.
std::vector<AugmentedPair> BuildBackwardCorpus(std::span<const Transcript> corpus,
                                               std::size_t shift, const NoiseSpec& spec,
                                               const Alphabet& alphabet);
AugmentedPair AugmentSentence(const Transcript& clean, std::size_t index,
                              std::size_t shift, const NoiseSpec& spec,
                              const Alphabet& alphabet);

// Three-line records: clean text, noisy future text, alignment map as
// space-separated indices ("END" for kFutureEnd).
void WriteAugmentedCorpus(std::ostream& out, std::span<const AugmentedPair> pairs,
                          const Alphabet& alphabet);
std::vector<AugmentedPair> ReadAugmentedCorpus(std::istream& in, const Alphabet& alphabet);

}  // namespace ctcdec
