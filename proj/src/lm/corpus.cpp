// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/lm/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "ctcdec/error.hpp"

namespace ctcdec {

bool CorpusFilter::Keep(std::string_view line) {
  std::size_t letters = 0;
  std::size_t visible = 0;
  for (const auto& cp : SplitCodePoints(line)) {
    if (cp.size() == 1) {
      const unsigned char c = static_cast<unsigned char>(cp[0]);
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) ++letters;
    }
    ++visible;
  }
  if (letters < kMinLetters) return false;
  return static_cast<double>(letters) >= kMinAlphabeticShare * static_cast<double>(visible);
}

FilterStats FilterCorpus(std::istream& in, std::ostream& out) {
  FilterStats stats;
  std::string line;
  while (std::getline(in, line)) {
    if (CorpusFilter::Keep(line)) {
      out << line << '\n';
      ++stats.kept;
    } else {
      ++stats.dropped;
    }
  }
  return stats;
}

std::vector<Transcript> ReadCorpus(std::istream& in, const Alphabet& alphabet) {
  std::vector<Transcript> corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    corpus.push_back(Transcript{alphabet.Encode(line)});
  }
  return corpus;
}

std::vector<Transcript> LoadCorpus(const std::string& path, const Alphabet& alphabet) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path);
  return ReadCorpus(in, alphabet);
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace ctcdec
