// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/eval/errors.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "ctcdec/error.hpp"

namespace ctcdec {

std::vector<AlignedOp> EditAlignment(std::span<const TokenId> hyp, std::span<const TokenId> ref) {
  const std::size_t m = ref.size();
  const std::size_t n = hyp.size();
  // dist[i][j]: cost of aligning ref[0, i) with hyp[0, j).
  std::vector<std::size_t> dist((m + 1) * (n + 1));
  auto at = [n, &dist](std::size_t i, std::size_t j) -> std::size_t& { return dist[i * (n + 1) + j]; };
  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }

  std::vector<AlignedOp> ops;
  ops.reserve(std::max(m, n));
  const std::size_t last_ref = m == 0 ? 0 : m - 1;
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        ops.push_back({same ? EditKind::kMatch : EditKind::kSubstitution, i - 1, j - 1});
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ops.push_back({EditKind::kInsertion, std::min(i, last_ref), j - 1});
      --j;
    } else {
      ops.push_back({EditKind::kDeletion, i - 1, j});
      --i;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  insertions += o.insertions;
  deletions += o.deletions;
  substitutions += o.substitutions;
  ref_length += o.ref_length;
  return *this;
}

ErrorCounts CountErrors(std::span<const AlignedOp> ops, std::size_t ref_length) {
  ErrorCounts c;
  c.ref_length = ref_length;
  for (const auto& op : ops) {
    switch (op.kind) {
      case EditKind::kMatch:
        break;
      case EditKind::kSubstitution:
        ++c.substitutions;
        break;
      case EditKind::kInsertion:
        ++c.insertions;
        break;
      case EditKind::kDeletion:
        ++c.deletions;
        break;
    }
  }
  return c;
}

double ErrorReport::cer() const {
  if (counts.ref_length == 0) return 0.0;
  return static_cast<double>(counts.errors()) / static_cast<double>(counts.ref_length);
}

void ErrorReport::Merge(const ErrorReport& other) {
  if (position_histogram.size() != other.position_histogram.size()) {
    throw DomainError("report: histogram bin counts differ");
  }
  counts += other.counts;
  for (std::size_t b = 0; b < position_histogram.size(); ++b) {
    position_histogram[b] += other.position_histogram[b];
  }
  per_utterance.insert(per_utterance.end(), other.per_utterance.begin(),
                       other.per_utterance.end());
}

ErrorReport Evaluate(std::span<const Transcript> hyps, std::span<const Transcript> refs,
                     std::size_t num_bins) {
  if (hyps.size() != refs.size()) {
    throw DomainError("evaluate: " + std::to_string(hyps.size()) + " hypotheses but " +
                      std::to_string(refs.size()) + " references");
  }
  if (num_bins == 0) throw DomainError("evaluate: need at least one histogram bin");
  ErrorReport report;
  for (std::size_t u = 0; u < hyps.size(); ++u) {
    UtteranceErrors utt;
    utt.hyp = hyps[u];
    utt.ref = refs[u];
    utt.ops = EditAlignment(hyps[u].labels, refs[u].labels);
    utt.counts = CountErrors(utt.ops, refs[u].size());
    report.counts += utt.counts;
    report.per_utterance.push_back(std::move(utt));
  }
  report.position_histogram = RelativeErrorPositions(report.per_utterance, num_bins);
  return report;
}

std::optional<TypeProportions> ErrorTypeProportions(const ErrorCounts& counts) {
  const auto total = static_cast<double>(counts.errors());
  if (total == 0.0) return std::nullopt;
  return TypeProportions{static_cast<double>(counts.insertions) / total,
                         static_cast<double>(counts.deletions) / total,
                         static_cast<double>(counts.substitutions) / total};
}

std::vector<std::size_t> RelativeErrorPositions(std::span<const UtteranceErrors> utterances,
                                                std::size_t num_bins) {
  std::vector<std::size_t> hist(num_bins, 0);
  for (const auto& utt : utterances) {
    const std::size_t len = utt.ref.size();
    for (const auto& op : utt.ops) {
      if (op.kind == EditKind::kMatch) continue;
      std::size_t bin = 0;
      if (len > 0) {
        // Integer form of floor(pos / len * bins), exact at bin edges.
        bin = std::min(num_bins - 1, op.ref_pos * num_bins / len);
      }
      ++hist[bin];
    }
  }
  return hist;
}

std::vector<long long> HistogramImprovement(const ErrorReport& uni, const ErrorReport& bi) {
  if (uni.position_histogram.size() != bi.position_histogram.size()) {
    throw DomainError("compare: histogram bin counts differ");
  }
  std::vector<long long> delta(uni.position_histogram.size());
  for (std::size_t b = 0; b < delta.size(); ++b) {
    delta[b] = static_cast<long long>(uni.position_histogram[b]) -
               static_cast<long long>(bi.position_histogram[b]);
  }
  return delta;
}

namespace {

void WriteProportions(std::ostream& out, const ErrorCounts& counts) {
  auto p = ErrorTypeProportions(counts);
  if (!p) {
    out << "insertion_share: N/A\ndeletion_share: N/A\nsubstitution_share: N/A\n";
    return;
  }
  out << "insertion_share: " << 100.0 * p->insertion << "%\n"
      << "deletion_share: " << 100.0 * p->deletion << "%\n"
      << "substitution_share: " << 100.0 * p->substitution << "%\n";
}

}  // namespace

void WriteReport(std::ostream& out, const ErrorReport& report) {
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(4);
  out << "utterances: " << report.per_utterance.size() << '\n'
      << "ref_length: " << report.counts.ref_length << '\n'
      << "cer: " << 100.0 * report.cer() << "%\n"
      << "insertions: " << report.counts.insertions << '\n'
      << "deletions: " << report.counts.deletions << '\n'
      << "substitutions: " << report.counts.substitutions << '\n';
  WriteProportions(out, report.counts);
  const std::size_t bins = report.position_histogram.size();
  for (std::size_t b = 0; b < bins; ++b) {
    out << "bin " << static_cast<double>(b) / static_cast<double>(bins) << ' '
        << static_cast<double>(b + 1) / static_cast<double>(bins) << ' '
        << report.position_histogram[b] << '\n';
  }
  out.flags(flags);
}

void WriteReportTsv(std::ostream& out, const ErrorReport& report) {
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(6);
  out << "utterances\tref_length\tcer\tinsertions\tdeletions\tsubstitutions\n"
      << report.per_utterance.size() << '\t' << report.counts.ref_length << '\t' << report.cer()
      << '\t' << report.counts.insertions << '\t' << report.counts.deletions << '\t'
      << report.counts.substitutions << '\n';
  out << "bin_start\tbin_end\terrors\n";
  const std::size_t bins = report.position_histogram.size();
  for (std::size_t b = 0; b < bins; ++b) {
    out << static_cast<double>(b) / static_cast<double>(bins) << '\t'
        << static_cast<double>(b + 1) / static_cast<double>(bins) << '\t'
        << report.position_histogram[b] << '\n';
  }
  out.flags(flags);
}

void WriteComparison(std::ostream& out, const ErrorReport& uni, const ErrorReport& bi) {
  const auto delta = HistogramImprovement(uni, bi);
  out << "[unidirectional]\n";
  WriteReport(out, uni);
  out << "[bidirectional]\n";
  WriteReport(out, bi);
  out << "[improvement]\n";
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(4);
  out << "cer_delta: " << 100.0 * (uni.cer() - bi.cer()) << "%\n";
  const std::size_t bins = delta.size();
  for (std::size_t b = 0; b < bins; ++b) {
    out << "bin " << static_cast<double>(b) / static_cast<double>(bins) << ' '
        << static_cast<double>(b + 1) / static_cast<double>(bins) << ' ' << delta[b] << '\n';
  }
  out.flags(flags);
}

}  // namespace ctcdec
