// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/core/ctc.hpp"

#include <string>

#include "ctcdec/error.hpp"

namespace ctcdec {

Transcript Collapse(const AlignmentPath& alignment, const Alphabet& alphabet) {
  Transcript out;
  TokenId prev = -1;
  for (TokenId id : alignment.labels) {
    if (!alphabet.Valid(id)) {
      throw DomainError("collapse: invalid token id " + std::to_string(id));
    }
    if (id != prev && !alphabet.IsBlank(id)) out.labels.push_back(id);
    prev = id;
  }
  return out;
}

GreedyResult GreedyDecode(const PosteriorLattice& lattice, const Alphabet& alphabet) {
  if (lattice.num_tokens() != alphabet.size()) {
    throw DomainError("greedy: lattice has " + std::to_string(lattice.num_tokens()) +
                      " columns, alphabet has " + std::to_string(alphabet.size()));
  }
  GreedyResult result;
  result.alignment.labels.reserve(lattice.num_frames());
  result.frame_to_label.assign(lattice.num_frames(), kNoLabel);
  TokenId prev = -1;
  for (std::size_t t = 0; t < lattice.num_frames(); ++t) {
    auto row = lattice.frame(t);
    std::size_t best = 0;
    for (std::size_t v = 1; v < row.size(); ++v) {
      if (row[v] > row[best]) best = v;
    }
    auto id = static_cast<TokenId>(best);
    result.alignment.labels.push_back(id);
    if (id != prev && !alphabet.IsBlank(id)) {
      result.frame_to_label[t] = result.transcript.labels.size();
      result.transcript.labels.push_back(id);
    }
    prev = id;
  }
  return result;
}

}  // namespace ctcdec
