// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the test binaries: random inputs and brute-force
// reference implementations that share no code with the library paths they
// check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ctcdec/core/alphabet.hpp"
#include "ctcdec/core/ctc.hpp"
#include "ctcdec/core/lattice.hpp"
#include "ctcdec/lm/bilm.hpp"
#include "ctcdec/lm/ngram.hpp"
#include "ctcdec/random.hpp"

namespace ctcdec::testing {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// blank, <s>, </s>, then `lexical` letters starting at 'a'; no <unk>.
inline std::shared_ptr<const Alphabet> LetterAlphabet(std::size_t lexical) {
  std::string chars;
  for (std::size_t i = 0; i < lexical; ++i) chars.push_back(static_cast<char>('a' + i));
  return std::make_shared<const Alphabet>(Alphabet::FromCharacters(chars, false));
}

/// Lattice with independent random logits; `spread` scales their range.
inline PosteriorLattice RandomLattice(std::size_t frames, std::size_t tokens, Rng& rng,
                                      double spread = 4.0) {
  std::vector<double> logits(frames * tokens);
  for (double& x : logits) x = spread * (rng.Uniform() - 0.5);
  return PosteriorLattice::FromLogits(frames, tokens, logits);
}

/// Lattice whose rows can carry exact ties: logits are drawn from a small grid.
inline PosteriorLattice TieProneLattice(std::size_t frames, std::size_t tokens, Rng& rng) {
  std::vector<double> logits(frames * tokens);
  for (double& x : logits) x = static_cast<double>(rng.Below(3));
  return PosteriorLattice::FromLogits(frames, tokens, logits);
}

inline Transcript RandomTranscript(const Alphabet& alphabet, std::size_t min_len,
                                   std::size_t max_len, Rng& rng) {
  const auto lexical = alphabet.LexicalIds();
  const std::size_t len = min_len + rng.Below(max_len - min_len + 1);
  Transcript t;
  for (std::size_t i = 0; i < len; ++i) t.labels.push_back(lexical[rng.Below(lexical.size())]);
  return t;
}

inline std::vector<Transcript> RandomCorpus(const Alphabet& alphabet, std::size_t sentences,
                                            std::size_t min_len, std::size_t max_len, Rng& rng) {
  std::vector<Transcript> out;
  for (std::size_t i = 0; i < sentences; ++i) {
    out.push_back(RandomTranscript(alphabet, min_len, max_len, rng));
  }
  return out;
}

inline double LogSumExpOf(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

/// Textbook recursive edit distance, exponential; only for short inputs.
inline std::size_t RecursiveEditDistance(const std::vector<TokenId>& a, std::size_t i,
                                         const std::vector<TokenId>& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  if (a[i] == b[j]) return RecursiveEditDistance(a, i + 1, b, j + 1);
  return 1 + std::min({RecursiveEditDistance(a, i + 1, b, j + 1),
                       RecursiveEditDistance(a, i + 1, b, j),
                       RecursiveEditDistance(a, i, b, j + 1)});
}

/// Memoized form of the same recursion, for the acceptance sweep.
inline std::size_t MemoEditDistance(const std::vector<TokenId>& a, const std::vector<TokenId>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t r = a[i] == b[j] ? go(i + 1, j + 1)
                                 : 1 + std::min({go(i + 1, j + 1), go(i + 1, j), go(i, j + 1)});
    memo[key] = r;
    return r;
  };
  return go(0, 0);
}

/// Exhaustive decoding oracle.
///
/// Enumerates every frame-level path over blank and the lexical tokens. A path
/// scores its acoustic log-probability plus, at each frame that starts a new
/// label, lm_weight * log p(label | context) + length_reward, where the context
/// is the collapsed path so far (and, for the bidirectional objective, the
/// backward state for that frame). Path scores are summed per collapsed string.
class DecodeOracle {
 public:
  struct Result {
    std::map<std::vector<TokenId>, double> scores;
    std::vector<TokenId> best;
    double best_score = kNegInf;
    /// Smallest gap between the best and any other string.
    double margin = std::numeric_limits<double>::infinity();
  };

  /// `lm(t, prefix)` returns the LM log-distribution used at frame t.
  using LmFn = std::function<std::vector<double>(std::size_t, const std::vector<TokenId>&)>;

  static Result Run(const PosteriorLattice& lattice, const Alphabet& alphabet, double lm_weight,
                    double length_reward, const LmFn& lm) {
    std::vector<TokenId> symbols{alphabet.blank_id()};
    for (TokenId id : alphabet.LexicalIds()) symbols.push_back(id);
    const std::size_t frames = lattice.num_frames();

    std::map<std::vector<TokenId>, std::vector<double>> path_scores;
    std::map<std::pair<std::size_t, std::vector<TokenId>>, std::vector<double>> lm_cache;
    auto lm_at = [&](std::size_t t, const std::vector<TokenId>& prefix) -> const std::vector<double>& {
      auto key = std::make_pair(t, prefix);
      auto it = lm_cache.find(key);
      if (it == lm_cache.end()) it = lm_cache.emplace(key, lm(t, prefix)).first;
      return it->second;
    };

    std::vector<std::size_t> digits(frames, 0);
    while (true) {
      double score = 0.0;
      std::vector<TokenId> collapsed;
      TokenId prev = -1;
      for (std::size_t t = 0; t < frames; ++t) {
        const TokenId s = symbols[digits[t]];
        score += lattice.at(t, static_cast<std::size_t>(s));
        if (s != alphabet.blank_id() && s != prev) {
          score += lm_weight * lm_at(t, collapsed)[static_cast<std::size_t>(s)] + length_reward;
          collapsed.push_back(s);
        }
        prev = s;
      }
      path_scores[collapsed].push_back(score);

      std::size_t pos = 0;
      while (pos < frames && ++digits[pos] == symbols.size()) digits[pos++] = 0;
      if (pos == frames) break;
    }

    Result r;
    for (const auto& [labels, scores] : path_scores) {
      const double total = LogSumExpOf(scores);
      r.scores[labels] = total;
      if (total > r.best_score) {
        r.best_score = total;
        r.best = labels;
      }
    }
    for (const auto& [labels, total] : r.scores) {
      if (labels != r.best) r.margin = std::min(r.margin, r.best_score - total);
    }
    return r;
  }

  /// Forward-LM objective.
  static LmFn Forward(const NGramLM& fwd) {
    return [&fwd](std::size_t, const std::vector<TokenId>& prefix) {
      return fwd.Predict(fwd.StateFor(prefix));
    };
  }

  /// Bidirectional objective: the backward context at frame t is the greedy
  /// transcript from the first label emitted after t, shifted by tau, read
  /// through StateFor; empty once it runs past the transcript end.
  static LmFn Bidirectional(const PosteriorLattice& lattice, const Alphabet& alphabet,
                            const NGramLM& fwd, const NGramLM& bwd, double lambda) {
    std::vector<TokenId> argmax(lattice.num_frames());
    for (std::size_t t = 0; t < lattice.num_frames(); ++t) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < lattice.num_tokens(); ++c) {
        if (lattice.at(t, c) > lattice.at(t, best)) best = c;
      }
      argmax[t] = static_cast<TokenId>(best);
    }
    // Label index emitted at each frame (or -1) and the greedy transcript.
    std::vector<TokenId> greedy;
    std::vector<long> emitted(lattice.num_frames(), -1);
    for (std::size_t t = 0; t < argmax.size(); ++t) {
      if (argmax[t] != alphabet.blank_id() && (t == 0 || argmax[t] != argmax[t - 1])) {
        emitted[t] = static_cast<long>(greedy.size());
        greedy.push_back(argmax[t]);
      }
    }
    std::vector<std::vector<double>> bwd_dist(lattice.num_frames());
    for (std::size_t t = 0; t < lattice.num_frames(); ++t) {
      std::size_t next = greedy.size();
      for (std::size_t s = t + 1; s < lattice.num_frames(); ++s) {
        if (emitted[s] >= 0) {
          next = static_cast<std::size_t>(emitted[s]);
          break;
        }
      }
      const std::size_t start = next + bwd.shift();
      if (start > greedy.size()) {
        bwd_dist[t] = bwd.Predict(bwd.EmptyState());
      } else {
        std::vector<TokenId> future(greedy.begin() + static_cast<long>(start), greedy.end());
        bwd_dist[t] = bwd.Predict(bwd.StateFor(future));
      }
    }
    return [&fwd, bwd_dist, lambda](std::size_t t, const std::vector<TokenId>& prefix) {
      const auto f = fwd.Predict(fwd.StateFor(prefix));
      const auto& b = bwd_dist[t];
      if (lambda == 1.0) return f;
      std::vector<double> out(f.size(), kNegInf);
      for (std::size_t c = 0; c < f.size(); ++c) {
        if (f[c] == kNegInf || b[c] == kNegInf) continue;
        out[c] = lambda * f[c] + (1.0 - lambda) * b[c];
      }
      const double z = LogSumExpOf(out);
      for (double& x : out) {
        if (x != kNegInf) x -= z;
      }
      return out;
    };
  }
};

}  // namespace ctcdec::testing
