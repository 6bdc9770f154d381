// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/decoder/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "ctcdec/decoder/prefix_search.hpp"
#include "ctcdec/error.hpp"

namespace ctcdec {

void DecodeParams::Validate() const {
  if (beam_width < 1) throw DomainError("decode: beam width must be at least 1");
  if (!(lm_weight >= 0.0) || std::isinf(lm_weight)) {
    throw DomainError("decode: lm weight must be finite and non-negative");
  }
  if (!std::isfinite(length_reward)) throw DomainError("decode: length reward must be finite");
  if (std::isnan(beam_threshold)) throw DomainError("decode: beam threshold is NaN");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("decode: lambda must lie in [0, 1]");
}

BackwardStateCache::BackwardStateCache(const NGramLM& backward, const Transcript& greedy)
    : empty_(backward.EmptyState()) {
  if (backward.direction() != Direction::kBackward) {
    throw DomainError("backward cache: model is not a backward model");
  }
  const std::size_t n = greedy.size();
  states_.resize(n + 1);
  states_[n] = backward.StartState();
  for (std::size_t i = n; i-- > 0;) states_[i] = backward.Advance(states_[i + 1], greedy.labels[i]);
}

std::size_t BackwardStateCache::IndexFor(std::size_t next_label, std::size_t shift) const {
  const std::size_t end = states_.size() - 1;
  const std::size_t pos = next_label == kNoLabel ? end : next_label;
  const std::size_t index = pos + shift;
  return index <= end ? index : kNoLabel;
}

const LMState& BackwardStateCache::ForFuture(std::size_t next_label, std::size_t shift) const {
  const std::size_t index = IndexFor(next_label, shift);
  return index == kNoLabel ? empty_ : states_[index];
}

std::size_t NextNonblankLabel(const GreedyResult& greedy, std::size_t t) {
  for (std::size_t s = t + 1; s < greedy.frame_to_label.size(); ++s) {
    if (greedy.frame_to_label[s] != kNoLabel) return greedy.frame_to_label[s];
  }
  return kNoLabel;
}

namespace {

void CheckCompatible(const PosteriorLattice& lattice, const Alphabet& alphabet) {
  if (lattice.num_tokens() != alphabet.size()) {
    throw DomainError("decode: lattice has " + std::to_string(lattice.num_tokens()) +
                      " columns but the model alphabet has " + std::to_string(alphabet.size()));
  }
}

// Frame-level next-label lookup for every frame in one backward pass.
std::vector<std::size_t> NextLabelTable(const GreedyResult& greedy) {
  const std::size_t frames = greedy.frame_to_label.size();
  std::vector<std::size_t> next(frames, kNoLabel);
  std::size_t upcoming = kNoLabel;
  for (std::size_t t = frames; t-- > 0;) {
    next[t] = upcoming;
    if (greedy.frame_to_label[t] != kNoLabel) upcoming = greedy.frame_to_label[t];
  }
  return next;
}

std::shared_ptr<const std::vector<double>> ForwardDist(const NGramLM& lm, Hypothesis& h) {
  if (!h.fwd_dist) h.fwd_dist = std::make_shared<const std::vector<double>>(lm.Predict(h.fwd_state));
  return h.fwd_dist;
}

// Shared beam loop. `lm_dist(t, hyp)` returns the LM log-distribution used to
// score extensions of `hyp` at frame t.
template <typename LmDist>
NBestList Search(const PosteriorLattice& lattice, const NGramLM& forward,
                 const DecodeParams& params, LmDist&& lm_dist) {
  const Alphabet& alphabet = forward.alphabet();
  const std::size_t vocab = alphabet.size();
  const TokenId blank = alphabet.blank_id();
  const double threshold = std::abs(params.beam_threshold);

  PrefixTree tree;
  std::vector<Hypothesis> beam(1);
  beam[0].log_p_blank = 0.0;
  beam[0].am_log_p_blank = 0.0;
  beam[0].fwd_state = forward.StartState();

  std::vector<double> bonus;
  std::vector<std::size_t> order;
  for (std::size_t t = 0; t < lattice.num_frames(); ++t) {
    bonus.assign(beam.size() * vocab, kLogZero);
    for (std::size_t i = 0; i < beam.size(); ++i) {
      const std::vector<double>& dist = lm_dist(t, beam[i]);
      double* row = bonus.data() + i * vocab;
      for (std::size_t c = 0; c < vocab; ++c) {
        if (!alphabet.IsEmittable(static_cast<TokenId>(c)) || dist[c] == kLogZero) continue;
        row[c] = params.lm_weight * dist[c] + params.length_reward;
      }
    }

    auto expanded = PrefixStep(tree, beam, lattice.frame(t), blank, bonus);

    double best = kLogZero;
    for (const auto& h : expanded) best = std::max(best, h.score());
    order.clear();
    for (std::size_t i = 0; i < expanded.size(); ++i) {
      const double s = expanded[i].score();
      if (s == kLogZero) continue;
      if (std::isfinite(threshold) && s < best - threshold) continue;
      order.push_back(i);
    }
    auto better = [&](std::size_t a, std::size_t b) {
      const double sa = expanded[a].score();
      const double sb = expanded[b].score();
      if (sa != sb) return sa > sb;
      return tree.Compare(expanded[a].prefix, expanded[b].prefix) < 0;
    };
    if (order.size() > params.beam_width) {
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(params.beam_width),
                        order.end(), better);
      order.resize(params.beam_width);
    } else {
      std::sort(order.begin(), order.end(), better);
    }

    std::vector<Hypothesis> next;
    next.reserve(order.size());
    for (std::size_t i : order) {
      Hypothesis h = std::move(expanded[i]);
      if (h.origin != Hypothesis::kNoOrigin) {
        h.fwd_state = forward.Advance(beam[h.origin].fwd_state, tree.last(h.prefix));
        h.fwd_dist.reset();
        h.origin = Hypothesis::kNoOrigin;
      }
      next.push_back(std::move(h));
    }
    beam = std::move(next);
  }

  NBestList result;
  result.params = params;
  for (const auto& h : beam) {
    NBestEntry e;
    e.labels = tree.Labels(h.prefix);
    e.score = h.score();
    e.am_score = h.am_score();
    e.length_reward = params.length_reward * static_cast<double>(e.labels.size());
    e.lm_score = e.score - e.am_score - e.length_reward;
    result.entries.push_back(std::move(e));
  }
  return result;
}

}  // namespace

NBestList DecodeUnidirectional(const PosteriorLattice& lattice, const NGramLM& forward,
                               const DecodeParams& params) {
  params.Validate();
  if (forward.direction() != Direction::kForward) {
    throw DomainError("decode: unidirectional search needs a forward model");
  }
  CheckCompatible(lattice, forward.alphabet());
  auto result = Search(lattice, forward, params,
                       [&forward](std::size_t, Hypothesis& h) -> const std::vector<double>& {
                         return *ForwardDist(forward, h);
                       });
  result.mode = NBestList::Mode::kUnidirectional;
  return result;
}

NBestList DecodeBidirectional(const PosteriorLattice& lattice, const BiLMCombiner& bilm,
                              const DecodeParams& params) {
  params.Validate();
  const NGramLM& forward = bilm.forward();
  const NGramLM& backward = bilm.backward();
  CheckCompatible(lattice, forward.alphabet());
  if (backward.shift() != params.future_shift) {
    throw DomainError("decode: backward model was trained with future shift " +
                      std::to_string(backward.shift()) + " but decoding requested " +
                      std::to_string(params.future_shift));
  }

  const GreedyResult greedy = GreedyDecode(lattice, forward.alphabet());
  const std::uint64_t advances_before = backward.advance_calls();
  const BackwardStateCache cache(backward, greedy.transcript);
  const std::size_t advances = backward.advance_calls() - advances_before;
  const auto next_label = NextLabelTable(greedy);

  // Backward predictions depend only on the cache index, so each is computed once.
  std::vector<std::optional<std::vector<double>>> bwd_dist(cache.size() + 1);
  std::vector<double> combined;
  auto lm_dist = [&](std::size_t t, Hypothesis& h) -> const std::vector<double>& {
    const std::size_t index = cache.IndexFor(next_label[t], params.future_shift);
    const std::size_t slot = index == kNoLabel ? cache.size() : index;
    if (!bwd_dist[slot]) {
      bwd_dist[slot] = backward.Predict(index == kNoLabel ? cache.empty() : cache.at(index));
    }
    combined = BiLMCombiner::Combine(*ForwardDist(forward, h), *bwd_dist[slot], params.lambda);
    return combined;
  };
  auto result = Search(lattice, forward, params, lm_dist);
  result.mode = NBestList::Mode::kBidirectional;
  result.backward_advances = advances;
  return result;
}

NBestList DecodeGreedy(const PosteriorLattice& lattice, const Alphabet& alphabet) {
  const auto greedy = GreedyDecode(lattice, alphabet);
  NBestList result;
  result.mode = NBestList::Mode::kGreedy;
  result.params.beam_width = 1;
  NBestEntry e;
  e.labels = greedy.transcript;
  double am = 0.0;
  for (std::size_t t = 0; t < lattice.num_frames(); ++t) {
    am += lattice.at(t, static_cast<std::size_t>(greedy.alignment.labels[t]));
  }
  e.score = am;
  e.am_score = am;
  result.entries.push_back(std::move(e));
  return result;
}

void WriteNBest(std::ostream& out, const NBestList& nbest, const Alphabet& alphabet) {
  std::ostringstream line;
  line << std::setprecision(10);
  for (std::size_t r = 0; r < nbest.entries.size(); ++r) {
    const auto& e = nbest.entries[r];
    line.str({});
    line << r + 1 << '\t' << e.score << '\t' << e.am_score << '\t' << e.lm_score << '\t'
         << alphabet.Decode(e.labels.labels) << '\n';
    out << line.str();
  }
}

}  // namespace ctcdec
