// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ctcdec/core/alphabet.hpp"
#include "ctcdec/core/ctc.hpp"

namespace ctcdec {

/// LM training corpus filter: keep a line only if it has at least
/// kMinLetters ASCII letters and letters make up at least half of its
/// non-whitespace characters.
struct CorpusFilter {
  static constexpr std::size_t kMinLetters = 10;
  static constexpr double kMinAlphabeticShare = 0.5;

  static bool Keep(std::string_view line);
};

struct FilterStats {
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

FilterStats FilterCorpus(std::istream& in, std::ostream& out);

/// One sentence per line; empty lines are skipped. Characters outside the
/// alphabet become <unk> (or throw when the alphabet has none).
std::vector<Transcript> ReadCorpus(std::istream& in, const Alphabet& alphabet);
std::vector<Transcript> LoadCorpus(const std::string& path, const Alphabet& alphabet);

/// One line per entry, keeping empty lines (hypothesis/reference files).
std::vector<std::string> ReadLines(const std::string& path);

}  // namespace ctcdec
