// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "ctcdec/core/alphabet.hpp"
#include "ctcdec/core/lattice.hpp"

namespace ctcdec {

/// Frame-level label sequence; blank allowed.
struct AlignmentPath {
  std::vector<TokenId> labels;
  bool operator==(const AlignmentPath&) const = default;
};

/// Collapsed label sequence; never contains blank.
struct Transcript {
  std::vector<TokenId> labels;
  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  bool operator==(const Transcript&) const = default;
  auto operator<=>(const Transcript&) const = default;
};

inline constexpr std::size_t kNoLabel = std::numeric_limits<std::size_t>::max();

struct GreedyResult {
  AlignmentPath alignment;
  Transcript transcript;
  /// For every frame, the transcript index of the label it emits, or kNoLabel
  /// for blank frames and frames repeating the previous frame's label.
  std::vector<std::size_t> frame_to_label;
};

/// CTC collapse: merge adjacent duplicates, then drop blanks.
/// Throws DomainError on ids outside the alphabet.
Transcript Collapse(const AlignmentPath& alignment, const Alphabet& alphabet);

/// Per-frame argmax (lowest id wins ties) followed by collapse.
GreedyResult GreedyDecode(const PosteriorLattice& lattice, const Alphabet& alphabet);

}  // namespace ctcdec
