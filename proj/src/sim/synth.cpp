// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/sim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ctcdec/error.hpp"

namespace ctcdec {

void LatticeSynthSpec::Validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (frames_per_label < 1) throw DomainError("synth: frames_per_label must be at least 1");
  if (!unit(blank_affinity) || !unit(emission_confidence) || !unit(corruption_rate) ||
      !unit(corrupted_true_share) || !unit(jitter)) {
    throw DomainError("synth: probabilities must lie in [0, 1]");
  }
  if (!(front_bias >= 1.0)) throw DomainError("synth: front_bias must be at least 1");
  if (corrupted_true_share >= 0.5) {
    throw DomainError("synth: corrupted_true_share must stay below 0.5 to move the argmax");
  }
}

namespace {

constexpr double kFrontRegion = 0.1;

// Fills one probability row. `peaks` get fixed masses; the remainder is spread
// evenly over every other token.
void FillRow(std::span<double> row, std::span<const std::pair<TokenId, double>> peaks) {
  double fixed = 0.0;
  for (const auto& [id, mass] : peaks) fixed += mass;
  const std::size_t rest_count = row.size() - peaks.size();
  const double rest = rest_count ? std::max(0.0, 1.0 - fixed) / static_cast<double>(rest_count) : 0.0;
  std::fill(row.begin(), row.end(), rest);
  for (const auto& [id, mass] : peaks) row[static_cast<std::size_t>(id)] = mass;
  double total = 0.0;
  for (double p : row) total += p;
  for (double& p : row) p = std::log(p / total);
}

double Jittered(double value, double jitter, Rng& rng) {
  return std::clamp(value + jitter * (2.0 * rng.Uniform() - 1.0), 0.0, 1.0);
}

TokenId WrongLabel(TokenId truth, const LatticeSynthSpec& spec,
                   const std::vector<TokenId>& lexical, Rng& rng) {
  auto it = spec.confusions.find(truth);
  if (it != spec.confusions.end() && !it->second.empty()) {
    return it->second[rng.Below(it->second.size())];
  }
  TokenId wrong = truth;
  while (wrong == truth) wrong = lexical[rng.Below(lexical.size())];
  return wrong;
}

}  // namespace

PosteriorLattice SynthesizeLattice(const Transcript& reference, const LatticeSynthSpec& spec,
                                   const Alphabet& alphabet, Rng& rng) {
  spec.Validate();
  const auto lexical = alphabet.LexicalIds();
  if (lexical.size() < 2) throw DomainError("synth: need at least two lexical tokens");
  const TokenId blank = alphabet.blank_id();
  const std::size_t vocab = alphabet.size();
  const std::size_t fpl = spec.frames_per_label;

  // Frame plan: for each frame, the label slot it belongs to (or none) and
  // whether it is the emitting frame of that slot.
  struct Slot {
    std::size_t label = kNoLabel;
    bool emits = false;
  };
  std::vector<Slot> plan;
  if (reference.empty()) {
    plan.assign(fpl, Slot{});
  }
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (fpl == 1 && i > 0 && reference.labels[i] == reference.labels[i - 1]) {
      plan.push_back(Slot{});  // keeps a repeated label from merging
    }
    for (std::size_t f = 0; f < fpl; ++f) plan.push_back({i, f == fpl / 2});
  }

  const std::size_t frames = plan.size();
  const auto front_frames = static_cast<double>(frames) * kFrontRegion;
  std::vector<double> data(frames * vocab);
  std::vector<std::pair<TokenId, double>> peaks;
  for (std::size_t t = 0; t < frames; ++t) {
    std::span<double> row(data.data() + t * vocab, vocab);
    const Slot& slot = plan[t];
    peaks.clear();
    if (slot.label == kNoLabel) {
      peaks.emplace_back(blank, Jittered(spec.blank_affinity, spec.jitter, rng));
    } else if (!slot.emits) {
      const double b = Jittered(spec.blank_affinity, spec.jitter, rng);
      peaks.emplace_back(blank, b);
      peaks.emplace_back(reference.labels[slot.label], 0.5 * (1.0 - b));
    } else {
      const TokenId truth = reference.labels[slot.label];
      const double conf = Jittered(spec.emission_confidence, spec.jitter, rng);
      const double rate = std::min(
          1.0, spec.corruption_rate *
                   (static_cast<double>(t) < front_frames ? spec.front_bias : 1.0));
      peaks.emplace_back(blank, 0.5 * (1.0 - conf));
      if (rng.Bernoulli(rate)) {
        const TokenId wrong = WrongLabel(truth, spec, lexical, rng);
        peaks.emplace_back(wrong, conf * (1.0 - spec.corrupted_true_share));
        peaks.emplace_back(truth, conf * spec.corrupted_true_share);
      } else {
        peaks.emplace_back(truth, conf);
      }
    }
    FillRow(row, peaks);
  }
  return PosteriorLattice(frames, vocab, std::move(data));
}

std::vector<PosteriorLattice> SynthesizeCorpus(std::span<const Transcript> references,
                                               const LatticeSynthSpec& spec,
                                               const Alphabet& alphabet) {
  std::vector<PosteriorLattice> out;
  out.reserve(references.size());
  for (std::size_t i = 0; i < references.size(); ++i) {
    Rng rng(MixSeed(spec.seed, i));
    out.push_back(SynthesizeLattice(references[i], spec, alphabet, rng));
  }
  return out;
}

Alphabet TextAlphabet() { return Alphabet::FromCharacters(" 'abcdefghijklmnopqrstuvwxyz"); }

std::vector<Transcript> BundledSentences(const Alphabet& alphabet) {
  std::vector<Transcript> out;
  std::istringstream in{std::string(BundledText())};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(Transcript{alphabet.Encode(line)});
  }
  return out;
}

CharMarkovChain::CharMarkovChain(std::span<const Transcript> corpus, const Alphabet& alphabet,
                                 int order)
    : order_(order), bos_(alphabet.bos_id()), eos_(alphabet.eos_id()) {
  if (order_ < 1) throw DomainError("markov: order must be at least 1");
  if (corpus.empty()) throw DomainError("markov: empty corpus");
  for (const auto& sentence : corpus) {
    std::vector<TokenId> history(static_cast<std::size_t>(order_), bos_);
    for (std::size_t t = 0; t <= sentence.size(); ++t) {
      const TokenId next = t < sentence.size() ? sentence.labels[t] : eos_;
      auto& f = table_[history];
      auto it = std::find_if(f.counts.begin(), f.counts.end(),
                             [next](const auto& p) { return p.first == next; });
      if (it == f.counts.end()) {
        f.counts.emplace_back(next, 1);
      } else {
        ++it->second;
      }
      ++f.total;
      history.erase(history.begin());
      history.push_back(next);
    }
  }
}

TokenId CharMarkovChain::Draw(const std::vector<TokenId>& history, Rng& rng) const {
  auto it = table_.find(history);
  if (it == table_.end()) return eos_;
  std::uint64_t pick = rng.Below(it->second.total);
  for (const auto& [token, count] : it->second.counts) {
    if (pick < count) return token;
    pick -= count;
  }
  return eos_;
}

Transcript CharMarkovChain::Sample(Rng& rng, std::size_t min_len, std::size_t max_len) const {
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Transcript out;
    std::vector<TokenId> history(static_cast<std::size_t>(order_), bos_);
    while (out.size() <= max_len) {
      const TokenId next = Draw(history, rng);
      if (next == eos_) break;
      out.labels.push_back(next);
      history.erase(history.begin());
      history.push_back(next);
    }
    if (out.size() >= min_len && out.size() <= max_len) return out;
  }
  throw DomainError("markov: could not sample a sentence within the length bounds");
}

std::vector<Transcript> CharMarkovChain::SampleCorpus(std::size_t count, std::uint64_t seed,
                                                      std::size_t min_len,
                                                      std::size_t max_len) const {
  std::vector<Transcript> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(MixSeed(seed, i));
    out.push_back(Sample(rng, min_len, max_len));
  }
  return out;
}

LexiconSampler::LexiconSampler(std::span<const Transcript> corpus, const Alphabet& alphabet,
                               std::size_t min_word_length) {
  const auto space = alphabet.Find(" ");
  if (!space) throw DomainError("lexicon: alphabet has no space token");
  space_ = *space;
  for (const auto& sentence : corpus) {
    std::vector<TokenId> word;
    auto flush = [&] {
      if (word.size() >= std::max<std::size_t>(min_word_length, 1)) words_.push_back(word);
      word.clear();
    };
    for (TokenId id : sentence.labels) {
      if (id == space_) {
        flush();
      } else {
        word.push_back(id);
      }
    }
    flush();
  }
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  if (words_.empty()) throw DomainError("lexicon: no word reaches the minimum length");
}

Transcript LexiconSampler::Sample(Rng& rng, std::size_t min_len, std::size_t max_len) const {
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Transcript out;
    while (out.size() < min_len) {
      if (!out.empty()) out.labels.push_back(space_);
      const auto& w = words_[rng.Below(words_.size())];
      out.labels.insert(out.labels.end(), w.begin(), w.end());
    }
    if (out.size() <= max_len) return out;
  }
  throw DomainError("lexicon: could not sample a sentence within the length bounds");
}

std::vector<Transcript> LexiconSampler::SampleCorpus(std::size_t count, std::uint64_t seed,
                                                     std::size_t min_len,
                                                     std::size_t max_len) const {
  std::vector<Transcript> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(MixSeed(seed, i));
    out.push_back(Sample(rng, min_len, max_len));
  }
  return out;
}

void WriteManifest(std::ostream& out, std::span<const ManifestEntry> entries) {
  for (const auto& e : entries) out << e.lattice_path << '\t' << e.reference << '\n';
}

std::vector<ManifestEntry> ReadManifest(std::istream& in) {
  std::vector<ManifestEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    ManifestEntry e;
    e.lattice_path = line.substr(0, tab);
    if (tab != std::string::npos) e.reference = line.substr(tab + 1);
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  return ReadManifest(in);
}

}  // namespace ctcdec
