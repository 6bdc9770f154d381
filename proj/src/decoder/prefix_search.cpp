// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/decoder/prefix_search.hpp"

#include <algorithm>

#include "ctcdec/error.hpp"

namespace ctcdec {

PrefixTree::PrefixTree() { nodes_.push_back({kRoot, -1, 0}); }

PrefixTree::NodeId PrefixTree::Child(NodeId parent, TokenId token) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(parent) << 32) | static_cast<std::uint32_t>(token);
  auto [it, inserted] = children_.try_emplace(key, static_cast<NodeId>(nodes_.size()));
  if (inserted) nodes_.push_back({parent, token, nodes_[parent].depth + 1});
  return it->second;
}

Transcript PrefixTree::Labels(NodeId node) const {
  Transcript out;
  out.labels.resize(nodes_[node].depth);
  for (std::size_t i = out.labels.size(); i-- > 0;) {
    out.labels[i] = nodes_[node].token;
    node = nodes_[node].parent;
  }
  return out;
}

int PrefixTree::Compare(NodeId a, NodeId b) const {
  if (a == b) return 0;
  const auto la = Labels(a).labels;
  const auto lb = Labels(b).labels;
  if (la < lb) return -1;
  return la == lb ? 0 : 1;
}

std::vector<Hypothesis> PrefixStep(PrefixTree& tree, std::span<const Hypothesis> beam,
                                   std::span<const double> frame, TokenId blank_id,
                                   std::span<const double> bonus) {
  const std::size_t vocab = frame.size();
  if (bonus.size() != beam.size() * vocab) {
    throw DomainError("prefix step: bonus table must be beam size x vocabulary");
  }
  const double blank_lp = frame[static_cast<std::size_t>(blank_id)];

  std::vector<Hypothesis> out;
  out.reserve(beam.size() * 2);
  std::unordered_map<PrefixTree::NodeId, std::size_t> where;
  where.reserve(beam.size() * 4);

  // Continuations: the prefix stays the same.
  for (const auto& h : beam) {
    Hypothesis next;
    next.prefix = h.prefix;
    next.fwd_state = h.fwd_state;
    next.fwd_dist = h.fwd_dist;
    next.log_p_blank = h.score() + blank_lp;
    next.am_log_p_blank = h.am_score() + blank_lp;
    if (h.prefix != PrefixTree::kRoot) {
      const double repeat_lp = frame[static_cast<std::size_t>(tree.last(h.prefix))];
      next.log_p_nonblank = h.log_p_nonblank + repeat_lp;
      next.am_log_p_nonblank = h.am_log_p_nonblank + repeat_lp;
    }
    auto [it, inserted] = where.try_emplace(h.prefix, out.size());
    if (!inserted) throw DomainError("prefix step: duplicate prefix in input beam");
    out.push_back(std::move(next));
  }

  // Extensions by one label.
  for (std::size_t i = 0; i < beam.size(); ++i) {
    const auto& h = beam[i];
    const TokenId last = h.prefix == PrefixTree::kRoot ? -1 : tree.last(h.prefix);
    const double* row = bonus.data() + i * vocab;
    for (std::size_t c = 0; c < vocab; ++c) {
      const auto token = static_cast<TokenId>(c);
      if (token == blank_id || row[c] == kLogZero || frame[c] == kLogZero) continue;
      // After a blank the same label starts a new symbol; directly after
      // itself it would merge, so only the blank-ending mass extends.
      const double from = token == last ? h.log_p_blank : h.score();
      const double from_am = token == last ? h.am_log_p_blank : h.am_score();
      if (from == kLogZero) continue;
      const auto child = tree.Child(h.prefix, token);
      auto [it, inserted] = where.try_emplace(child, out.size());
      if (inserted) {
        Hypothesis fresh;
        fresh.prefix = child;
        fresh.origin = i;
        out.push_back(std::move(fresh));
      }
      auto& target = out[it->second];
      target.log_p_nonblank = LogAdd(target.log_p_nonblank, from + frame[c] + row[c]);
      target.am_log_p_nonblank = LogAdd(target.am_log_p_nonblank, from_am + frame[c]);
    }
  }
  return out;
}

}  // namespace ctcdec
