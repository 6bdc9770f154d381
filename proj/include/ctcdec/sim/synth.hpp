// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctcdec/core/alphabet.hpp"
#include "ctcdec/core/ctc.hpp"
#include "ctcdec/core/lattice.hpp"
#include "ctcdec/random.hpp"

namespace ctcdec {

/// Shape of synthetic CTC posteriors.
///
/// Each reference label occupies frames_per_label frames: one emitting frame
/// in the middle, blank-dominant frames around it. A corrupted emitting frame
/// moves its argmax to a wrong label while the true label keeps
/// corrupted_true_share of the emission mass.
struct LatticeSynthSpec {
  std::size_t frames_per_label = 3;
  double blank_affinity = 0.8;
  double emission_confidence = 0.9;
  double corruption_rate = 0.0;
  /// Multiplies corruption_rate on frames in the first 10% of the lattice.
  double front_bias = 1.0;
  double corrupted_true_share = 0.35;
  /// Half-width of the uniform perturbation applied to the dominant mass of
  /// every frame.
  double jitter = 0.05;
  std::uint64_t seed = 0;
  /// Optional confusable labels per true token; empty entries fall back to a
  /// uniform draw over the other lexical tokens.
  std::map<TokenId, std::vector<TokenId>> confusions;

  void Validate() const;
};

/// Builds a normalized lattice for `reference`. An empty reference yields
/// frames_per_label blank-dominant frames.
PosteriorLattice SynthesizeLattice(const Transcript& reference, const LatticeSynthSpec& spec,
                                   const Alphabet& alphabet, Rng& rng);

/// Sentence i is synthesized with Rng(MixSeed(spec.seed, i)).
std::vector<PosteriorLattice> SynthesizeCorpus(std::span<const Transcript> references,
                                               const LatticeSynthSpec& spec,
                                               const Alphabet& alphabet);

/// Lower-case letters, space and apostrophe, plus the blank/<s>/</s>/<unk>
/// markers.
Alphabet TextAlphabet();

/// A few paragraphs of public-domain prose, lower-cased, one sentence per line.
std::string_view BundledText();
std::vector<Transcript> BundledSentences(const Alphabet& alphabet);

/// Character Markov chain used to generate sentences that share a
/// distribution with the LM training data.
class CharMarkovChain {
 public:
  CharMarkovChain(std::span<const Transcript> corpus, const Alphabet& alphabet, int order = 3);

  /// Samples one sentence; retries until its length lies in [min_len, max_len].
  Transcript Sample(Rng& rng, std::size_t min_len = 20, std::size_t max_len = 80) const;
  std::vector<Transcript> SampleCorpus(std::size_t count, std::uint64_t seed,
                                       std::size_t min_len = 20, std::size_t max_len = 80) const;

 private:
  struct Followers {
    std::vector<std::pair<TokenId, std::uint64_t>> counts;
    std::uint64_t total = 0;
  };
  TokenId Draw(const std::vector<TokenId>& history, Rng& rng) const;

  int order_;
  TokenId bos_;
  TokenId eos_;
  std::map<std::vector<TokenId>, Followers> table_;
};

/// Sentences of words drawn uniformly and independently from a fixed
/// lexicon. Characters depend on their neighbours within a word and on
/// nothing across word boundaries, so the right context of a word start is
/// as informative as the left context of a word end.
class LexiconSampler {
 public:
  /// Lexicon: distinct space-separated words of `corpus` with at least
  /// min_word_length tokens. Throws DomainError when none qualify.
  LexiconSampler(std::span<const Transcript> corpus, const Alphabet& alphabet,
                 std::size_t min_word_length = 4);

  const std::vector<std::vector<TokenId>>& words() const { return words_; }

  /// Appends words until the sentence reaches min_len; retries when it
  /// overshoots max_len.
  Transcript Sample(Rng& rng, std::size_t min_len = 20, std::size_t max_len = 80) const;
  std::vector<Transcript> SampleCorpus(std::size_t count, std::uint64_t seed,
                                       std::size_t min_len = 20, std::size_t max_len = 80) const;

 private:
  std::vector<std::vector<TokenId>> words_;
  TokenId space_;
};

/// Tab-separated manifest: lattice path, reference text.
struct ManifestEntry {
  std::string lattice_path;
  std::string reference;
};
void WriteManifest(std::ostream& out, std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> ReadManifest(std::istream& in);
std::vector<ManifestEntry> LoadManifest(const std::string& path);

}  // namespace ctcdec
