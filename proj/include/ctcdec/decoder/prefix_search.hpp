// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "ctcdec/core/alphabet.hpp"
#include "ctcdec/core/ctc.hpp"
#include "ctcdec/lm/ngram.hpp"
#include "ctcdec/log_math.hpp"

namespace ctcdec {

/// Interns label prefixes so that a prefix is identified by one integer.
/// Node 0 is the empty prefix.
class PrefixTree {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kRoot = 0;

  PrefixTree();

  /// Returns the node for parent + token, creating it on first use.
  NodeId Child(NodeId parent, TokenId token);

  NodeId parent(NodeId node) const { return nodes_[node].parent; }
  TokenId last(NodeId node) const { return nodes_[node].token; }
  std::size_t length(NodeId node) const { return nodes_[node].depth; }
  std::size_t size() const { return nodes_.size(); }

  Transcript Labels(NodeId node) const;
  /// Lexicographic comparison of the two prefixes (<0, 0, >0).
  int Compare(NodeId a, NodeId b) const;

 private:
  struct Node {
    NodeId parent;
    TokenId token;
    std::uint32_t depth;
  };
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, NodeId> children_;
};

/// One beam entry.
///
/// log_p_blank / log_p_nonblank hold the fused score mass of all alignments
/// of this prefix ending in blank / in its last label. Every non-blank
/// extension multiplies in its bonus (weighted LM log-prob plus length
/// reward), so for a frame-independent bonus the fused mass equals the
/// acoustic mass times the prefix's accumulated bonus. The am_* fields track
/// the purely acoustic mass of the same alignments.
struct Hypothesis {
  static constexpr std::size_t kNoOrigin = std::numeric_limits<std::size_t>::max();

  PrefixTree::NodeId prefix = PrefixTree::kRoot;
  double log_p_blank = kLogZero;
  double log_p_nonblank = kLogZero;
  double am_log_p_blank = kLogZero;
  double am_log_p_nonblank = kLogZero;
  LMState fwd_state;
  std::shared_ptr<const std::vector<double>> fwd_dist;  // cached Predict(fwd_state)
  /// For a prefix first created in the current step: index of the input
  /// hypothesis it extends. Its fwd_state is not yet advanced.
  std::size_t origin = kNoOrigin;

  double score() const { return LogAdd(log_p_blank, log_p_nonblank); }
  double am_score() const { return LogAdd(am_log_p_blank, am_log_p_nonblank); }
};

/// One frame of CTC prefix search.
///
/// `bonus` is row-major [beam.size() x frame.size()]: the log-score added to
/// the non-blank mass when hypothesis i is extended by token c. Entries at
/// -inf (blank, markers) disable the extension. Blank transitions and
/// repeat-label merges carry no bonus. Returned hypotheses are the merged
/// union of continued and extended prefixes, unpruned: prefixes from `beam`
/// first in input order, then new prefixes in (hypothesis, token) order.
std::vector<Hypothesis> PrefixStep(PrefixTree& tree, std::span<const Hypothesis> beam,
                                   std::span<const double> frame, TokenId blank_id,
                                   std::span<const double> bonus);

}  // namespace ctcdec
