// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctcdec/augment/noise.hpp"
#include "ctcdec/core/alphabet.hpp"
#include "ctcdec/core/ctc.hpp"

namespace ctcdec {

enum class Direction { kForward, kBackward };

/// Context of an n-gram model, nearest token first. Forward states hold the
/// most recent history; backward states hold the (shifted) future, read
/// outward from the prediction point. States are plain values.
struct LMState {
  Direction direction = Direction::kForward;
  std::vector<TokenId> context;
  bool operator==(const LMState&) const = default;
};

/// Character n-gram language model with interpolated Witten-Bell smoothing.
///
/// The predictive support is every token except blank and <s>; </s> is a
/// regular outcome. Distributions are returned as vectors indexed by token id
/// with -inf at blank and <s>.
///
/// A backward model with shift tau predicts y_t from y_{t+1+tau}, y_{t+2+tau},
/// ... followed by </s>; the tau tokens right after t are never part of its
/// context. When t+1+tau runs past the sentence end the context is empty.
class NGramLM {
 public:
  static constexpr int kMaxOrder = 16;

  /// Counting only; probabilities are derived on demand.
  struct ContextCounts {
    std::vector<std::pair<TokenId, std::uint64_t>> counts;  // sorted by token
    std::uint64_t total = 0;
  };

  NGramLM(std::shared_ptr<const Alphabet> alphabet, int order, Direction direction,
          std::size_t shift);
  NGramLM(const NGramLM& other);
  NGramLM& operator=(const NGramLM&) = delete;
  NGramLM(NGramLM&& other) noexcept;

  /// Adds one prediction event. `context` is nearest-first and is truncated
  /// to order-1 tokens.
  void AddEvent(std::span<const TokenId> context, TokenId token);

  const Alphabet& alphabet() const { return *alphabet_; }
  std::shared_ptr<const Alphabet> shared_alphabet() const { return alphabet_; }
  int order() const { return order_; }
  Direction direction() const { return direction_; }
  std::size_t shift() const { return shift_; }
  /// Noise rate the training data was corrupted with, when recorded.
  std::optional<double> noise_epsilon() const { return noise_epsilon_; }
  void set_noise_epsilon(std::optional<double> eps) { noise_epsilon_ = eps; }

  bool InSupport(TokenId id) const;
  std::size_t support_size() const { return support_size_; }

  LMState EmptyState() const { return {direction_, {}}; }
  /// Boundary-primed state: [<s>] for forward models, [</s>] for backward.
  LMState StartState() const;
  /// Forward: state after reading `history` from the sentence start.
  /// Backward: state whose context is `future` followed by </s>.
  LMState StateFor(std::span<const TokenId> tokens) const;

  /// Returns a new state with `token` prepended; the input is untouched.
  /// Throws DomainError for blank or out-of-range tokens.
  LMState Advance(const LMState& state, TokenId token) const;

  std::vector<double> Predict(const LMState& state) const;
  double LogProb(const LMState& state, TokenId token) const;

  /// Raw event count c(context, token) and c(context) at exactly this context.
  std::uint64_t Count(std::span<const TokenId> context, TokenId token) const;
  std::uint64_t ContextTotal(std::span<const TokenId> context) const;

  /// Number of Advance calls since construction (instrumentation).
  std::uint64_t advance_calls() const { return advance_calls_.load(std::memory_order_relaxed); }

  // NGLM1 text format.
  void Write(std::ostream& out) const;
  static NGramLM Read(std::istream& in, std::shared_ptr<const Alphabet> alphabet);
  void Save(const std::string& path) const;
  static NGramLM Load(const std::string& path, std::shared_ptr<const Alphabet> alphabet);

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<TokenId>& key) const noexcept;
  };
  void CheckToken(TokenId token) const;

  std::shared_ptr<const Alphabet> alphabet_;
  int order_;
  Direction direction_;
  std::size_t shift_;
  std::optional<double> noise_epsilon_;
  std::size_t support_size_ = 0;
  std::unordered_map<std::vector<TokenId>, ContextCounts, KeyHash> table_;
  mutable std::atomic<std::uint64_t> advance_calls_{0};
};

/// Counts every prediction event of the corpus, sentence by sentence:
/// y_1..y_n and </s>. Throws DomainError on an empty corpus, order outside
/// [1, kMaxOrder], or a non-zero shift for a forward model.
NGramLM TrainNGram(std::span<const Transcript> corpus, std::shared_ptr<const Alphabet> alphabet,
                   int order, Direction direction, std::size_t shift = 0);

/// Backward model trained on noise-augmented futures: the context for target
/// t is noisy_future[alignment_map[t]..] followed by </s>.
NGramLM TrainBackwardNGram(std::span<const AugmentedPair> pairs,
                           std::shared_ptr<const Alphabet> alphabet, int order,
                           std::size_t shift, std::optional<double> noise_epsilon);

}  // namespace ctcdec
