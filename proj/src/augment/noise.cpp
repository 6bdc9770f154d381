// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/augment/noise.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "ctcdec/error.hpp"

namespace ctcdec {

void NoiseSpec::Validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("noise: epsilon must lie in [0, 1]");
  }
  if (mix.insertion < 0.0 || mix.deletion < 0.0 || mix.substitution < 0.0) {
    throw DomainError("noise: mix proportions must be non-negative");
  }
  if (std::abs(mix.insertion + mix.deletion + mix.substitution - 1.0) > 1e-9) {
    throw DomainError("noise: mix proportions must sum to 1");
  }
}

namespace {

EditOp DrawOp(const NoiseMix& mix, Rng& rng) {
  double u = rng.Uniform();
  if (u < mix.insertion) return EditOp::kInsertion;
  if (u < mix.insertion + mix.deletion) return EditOp::kDeletion;
  return EditOp::kSubstitution;
}

std::vector<bool> SelectPositions(std::size_t n, const NoiseSpec& spec, Rng& rng) {
  std::vector<bool> selected(n, false);
  if (!spec.exact_count) {
    for (std::size_t i = 0; i < n; ++i) selected[i] = rng.Bernoulli(spec.epsilon);
    return selected;
  }
  auto k = static_cast<std::size_t>(std::llround(spec.epsilon * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.Below(n - i);
    std::swap(order[i], order[j]);
    selected[order[i]] = true;
  }
  return selected;
}

}  // namespace

NoisyTranscript InjectNoise(const Transcript& clean, const NoiseSpec& spec,
                            const Alphabet& alphabet, Rng& rng) {
  spec.Validate();
  const auto lexical = alphabet.LexicalIds();
  if (lexical.size() < 2) {
    throw DomainError("noise: need at least two lexical tokens for substitution");
  }
  NoisyTranscript out;
  auto selected = SelectPositions(clean.size(), spec, rng);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const TokenId original = clean.labels[i];
    if (!selected[i]) {
      out.noisy.labels.push_back(original);
      continue;
    }
    switch (DrawOp(spec.mix, rng)) {
      case EditOp::kInsertion: {
        TokenId extra = lexical[rng.Below(lexical.size())];
        out.noisy.labels.push_back(original);
        out.noisy.labels.push_back(extra);
        out.edits.push_back({i, EditOp::kInsertion, extra});
        break;
      }
      case EditOp::kDeletion:
        out.edits.push_back({i, EditOp::kDeletion, original});
        break;
      case EditOp::kSubstitution: {
        // Uniform over lexical tokens other than the original.
        TokenId replacement = original;
        while (replacement == original) replacement = lexical[rng.Below(lexical.size())];
        out.noisy.labels.push_back(replacement);
        out.edits.push_back({i, EditOp::kSubstitution, replacement});
        break;
      }
    }
  }
  return out;
}

Transcript ReplayEdits(const Transcript& clean, std::span<const NoiseEdit> edits) {
  Transcript out;
  std::size_t e = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (e < edits.size() && edits[e].position == i) {
      const auto& edit = edits[e++];
      switch (edit.op) {
        case EditOp::kInsertion:
          out.labels.push_back(clean.labels[i]);
          out.labels.push_back(edit.token);
          break;
        case EditOp::kDeletion:
          break;
        case EditOp::kSubstitution:
          out.labels.push_back(edit.token);
          break;
      }
    } else {
      out.labels.push_back(clean.labels[i]);
    }
  }
  if (e != edits.size()) throw DomainError("replay: edit log does not match sequence");
  return out;
}

std::vector<std::size_t> NoisyStarts(std::size_t clean_length,
                                     std::span<const NoiseEdit> edits) {
  // Origin of every noisy token, in noisy order.
  std::vector<std::size_t> origin;
  origin.reserve(clean_length + edits.size());
  std::size_t e = 0;
  for (std::size_t i = 0; i < clean_length; ++i) {
    if (e < edits.size() && edits[e].position == i) {
      const auto& edit = edits[e++];
      if (edit.op == EditOp::kInsertion) {
        origin.push_back(i);
        origin.push_back(i);
      } else if (edit.op == EditOp::kSubstitution) {
        origin.push_back(i);
      }
    } else {
      origin.push_back(i);
    }
  }
  std::vector<std::size_t> starts(clean_length + 1, origin.size());
  // Walk backwards: starts[j] is the first noisy index with origin >= j.
  std::size_t k = origin.size();
  for (std::size_t j = clean_length + 1; j-- > 0;) {
    while (k > 0 && origin[k - 1] >= j) --k;
    starts[j] = k;
  }
  return starts;
}

std::vector<std::size_t> AlignFuture(std::size_t clean_length,
                                     std::span<const NoiseEdit> edits,
                                     std::size_t shift) {
  auto starts = NoisyStarts(clean_length, edits);
  std::vector<std::size_t> map(clean_length);
  for (std::size_t t = 0; t < clean_length; ++t) {
    std::size_t nominal = t + 1 + shift;
    map[t] = nominal <= clean_length ? starts[nominal] : kFutureEnd;
  }
  return map;
}

AugmentedPair AugmentSentence(const Transcript& clean, std::size_t index,
                              std::size_t shift, const NoiseSpec& spec,
                              const Alphabet& alphabet) {
  Rng rng(MixSeed(spec.seed, index));
  auto noisy = InjectNoise(clean, spec, alphabet, rng);
  AugmentedPair pair;
  pair.target = clean;
  pair.alignment_map = AlignFuture(clean.size(), noisy.edits, shift);
  pair.noisy_future = std::move(noisy.noisy);
  return pair;
}

std::vector<AugmentedPair> BuildBackwardCorpus(std::span<const Transcript> corpus,
                                               std::size_t shift, const NoiseSpec& spec,
                                               const Alphabet& alphabet) {
  spec.Validate();
  std::vector<AugmentedPair> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out.push_back(AugmentSentence(corpus[i], i, shift, spec, alphabet));
  }
  return out;
}

void WriteAugmentedCorpus(std::ostream& out, std::span<const AugmentedPair> pairs,
                          const Alphabet& alphabet) {
  for (const auto& pair : pairs) {
    out << alphabet.Decode(pair.target.labels) << '\n'
        << alphabet.Decode(pair.noisy_future.labels) << '\n';
    for (std::size_t t = 0; t < pair.alignment_map.size(); ++t) {
      if (t) out << ' ';
      if (pair.alignment_map[t] == kFutureEnd) {
        out << "END";
      } else {
        out << pair.alignment_map[t];
      }
    }
    out << '\n';
  }
}

std::vector<AugmentedPair> ReadAugmentedCorpus(std::istream& in, const Alphabet& alphabet) {
  std::vector<AugmentedPair> pairs;
  std::string clean, noisy, map;
  while (std::getline(in, clean)) {
    if (!std::getline(in, noisy) || !std::getline(in, map)) {
      throw IoError("augmented corpus: truncated record");
    }
    AugmentedPair pair;
    pair.target.labels = alphabet.Encode(clean);
    pair.noisy_future.labels = alphabet.Encode(noisy);
    std::istringstream fields(map);
    std::string field;
    while (fields >> field) {
      if (field == "END") {
        pair.alignment_map.push_back(kFutureEnd);
        continue;
      }
      try {
        pair.alignment_map.push_back(std::stoul(field));
      } catch (const std::exception&) {
        throw IoError("augmented corpus: bad index '" + field + "'");
      }
      if (pair.alignment_map.back() > pair.noisy_future.size()) {
        throw IoError("augmented corpus: index out of range");
      }
    }
    if (pair.alignment_map.size() != pair.target.size()) {
      throw IoError("augmented corpus: alignment map length mismatch");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace ctcdec
