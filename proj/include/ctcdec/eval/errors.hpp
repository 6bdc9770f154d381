// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctcdec/core/alphabet.hpp"
#include "ctcdec/core/ctc.hpp"

namespace ctcdec {

enum class EditKind { kMatch, kSubstitution, kInsertion, kDeletion };

/// One step of a hypothesis-vs-reference alignment. `ref_pos` is in
/// reference coordinates; an insertion is attributed to the reference index
/// it precedes (clamped to the last index for trailing insertions).
struct AlignedOp {
  EditKind kind;
  std::size_t ref_pos;
  std::size_t hyp_pos;
  bool operator==(const AlignedOp&) const = default;
};

/// Minimal unit-cost alignment. Among equal-cost paths the backtrace prefers
/// match/substitution, then insertion, then deletion at every cell.
std::vector<AlignedOp> EditAlignment(std::span<const TokenId> hyp, std::span<const TokenId> ref);

struct ErrorCounts {
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t substitutions = 0;
  std::size_t ref_length = 0;

  std::size_t errors() const { return insertions + deletions + substitutions; }
  ErrorCounts& operator+=(const ErrorCounts& o);
  bool operator==(const ErrorCounts&) const = default;
};

ErrorCounts CountErrors(std::span<const AlignedOp> ops, std::size_t ref_length);

struct UtteranceErrors {
  Transcript hyp;
  Transcript ref;
  std::vector<AlignedOp> ops;
  ErrorCounts counts;
};

struct ErrorReport {
  static constexpr std::size_t kDefaultBins = 10;

  ErrorCounts counts;
  std::vector<std::size_t> position_histogram;
  std::vector<UtteranceErrors> per_utterance;

  /// (ins + del + sub) / ref_length; 0 for an empty reference set.
  double cer() const;
  /// Appends another report's utterances; histograms must have equal bins.
  void Merge(const ErrorReport& other);
};

/// Builds the report for paired hypotheses and references. Throws
/// DomainError when the counts differ.
ErrorReport Evaluate(std::span<const Transcript> hyps, std::span<const Transcript> refs,
                     std::size_t num_bins = ErrorReport::kDefaultBins);

struct TypeProportions {
  double insertion;
  double deletion;
  double substitution;
};

/// Each type's share of all errors; nullopt when there are no errors.
std::optional<TypeProportions> ErrorTypeProportions(const ErrorCounts& counts);

/// Histogram of error positions relative to reference length: an error at
/// reference index p of a length-L reference falls in bin floor(p/L * bins).
/// Errors of empty references fall in bin 0.
std::vector<std::size_t> RelativeErrorPositions(std::span<const UtteranceErrors> utterances,
                                                std::size_t num_bins = ErrorReport::kDefaultBins);

/// "key: value" lines followed by one "bin" row per histogram bin.
void WriteReport(std::ostream& out, const ErrorReport& report);
/// Tab-separated: a header row, a totals row, then one row per bin.
void WriteReportTsv(std::ostream& out, const ErrorReport& report);
/// Both reports plus per-bin improvement (first errors minus second errors).
void WriteComparison(std::ostream& out, const ErrorReport& uni, const ErrorReport& bi);

std::vector<long long> HistogramImprovement(const ErrorReport& uni, const ErrorReport& bi);

}  // namespace ctcdec
