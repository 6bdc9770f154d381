// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/core/alphabet.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "ctcdec/error.hpp"

namespace ctcdec {

namespace {

constexpr const char* kBlankName = "<blank>";
constexpr const char* kBosName = "<s>";
constexpr const char* kEosName = "</s>";
constexpr const char* kUnkName = "<unk>";

std::size_t CodePointLength(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

std::vector<std::string> SplitCodePoints(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = CodePointLength(static_cast<unsigned char>(text[i]));
    len = std::min(len, text.size() - i);
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

Alphabet::Alphabet(std::vector<std::string> tokens, TokenId blank_id,
                   TokenId bos_id, TokenId eos_id,
                   std::optional<TokenId> unk_id)
    : tokens_(std::move(tokens)),
      blank_id_(blank_id),
      bos_id_(bos_id),
      eos_id_(eos_id),
      unk_id_(unk_id) {
  if (!Valid(blank_id_) || !Valid(bos_id_) || !Valid(eos_id_) ||
      (unk_id_ && !Valid(*unk_id_))) {
    throw DomainError("alphabet: special token id out of range");
  }
  std::set<TokenId> specials{blank_id_, bos_id_, eos_id_};
  if (unk_id_) specials.insert(*unk_id_);
  if (specials.size() != (unk_id_ ? 4u : 3u)) {
    throw DomainError("alphabet: blank/bos/eos/unk must be distinct");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw DomainError("alphabet: empty token");
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw DomainError("alphabet: duplicate token '" + tokens_[i] + "'");
    }
  }
}

Alphabet Alphabet::FromCharacters(std::string_view chars, bool with_unk) {
  std::vector<std::string> tokens{kBlankName, kBosName, kEosName};
  std::optional<TokenId> unk;
  if (with_unk) {
    unk = static_cast<TokenId>(tokens.size());
    tokens.emplace_back(kUnkName);
  }
  for (auto& cp : SplitCodePoints(chars)) tokens.push_back(std::move(cp));
  return Alphabet(std::move(tokens), 0, 1, 2, unk);
}

Alphabet Alphabet::Read(std::istream& in) {
  std::vector<std::string> tokens;
  std::optional<TokenId> blank, bos, eos, unk;
  auto mark = [&](std::optional<TokenId>& slot, const char* name,
                  const char* directive) {
    if (slot) throw IoError(std::string("alphabet: repeated ") + directive);
    slot = static_cast<TokenId>(tokens.size());
    tokens.emplace_back(name);
  };
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "#blank") {
      mark(blank, kBlankName, "#blank");
    } else if (line == "#bos") {
      mark(bos, kBosName, "#bos");
    } else if (line == "#eos") {
      mark(eos, kEosName, "#eos");
    } else if (line == "#unk") {
      mark(unk, kUnkName, "#unk");
    } else if (line.empty()) {
      throw IoError("alphabet: empty line at row " + std::to_string(tokens.size()));
    } else {
      tokens.push_back(line);
    }
  }
  if (!blank || !bos || !eos) {
    throw IoError("alphabet: #blank, #bos and #eos rows are required");
  }
  try {
    return Alphabet(std::move(tokens), *blank, *bos, *eos, unk);
  } catch (const DomainError& e) {
    throw IoError(e.what());
  }
}

Alphabet Alphabet::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open alphabet file " + path);
  return Read(in);
}

void Alphabet::Write(std::ostream& out) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto id = static_cast<TokenId>(i);
    if (id == blank_id_) {
      out << "#blank\n";
    } else if (id == bos_id_) {
      out << "#bos\n";
    } else if (id == eos_id_) {
      out << "#eos\n";
    } else if (unk_id_ && id == *unk_id_) {
      out << "#unk\n";
    } else {
      out << tokens_[i] << '\n';
    }
  }
}

const std::string& Alphabet::token(TokenId id) const {
  if (!Valid(id)) throw DomainError("alphabet: invalid token id " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Alphabet::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Alphabet::IsEmittable(TokenId id) const {
  return Valid(id) && id != blank_id_ && id != bos_id_ && id != eos_id_;
}

bool Alphabet::IsLexical(TokenId id) const {
  return IsEmittable(id) && !(unk_id_ && id == *unk_id_);
}

std::vector<TokenId> Alphabet::LexicalIds() const {
  std::vector<TokenId> ids;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (IsLexical(static_cast<TokenId>(i))) ids.push_back(static_cast<TokenId>(i));
  }
  return ids;
}

std::vector<TokenId> Alphabet::Encode(std::string_view text) const {
  std::vector<TokenId> ids;
  // "<unk>" is what Decode writes for the unknown marker; read it back as one token.
  if (unk_id_) {
    std::string_view marker = kUnkName;
    std::size_t pos = text.find(marker);
    if (pos != std::string_view::npos) {
      ids = Encode(text.substr(0, pos));
      ids.push_back(*unk_id_);
      auto rest = Encode(text.substr(pos + marker.size()));
      ids.insert(ids.end(), rest.begin(), rest.end());
      return ids;
    }
  }
  for (const auto& cp : SplitCodePoints(text)) {
    auto id = Find(cp);
    if (id && IsEmittable(*id)) {
      ids.push_back(*id);
    } else if (unk_id_) {
      ids.push_back(*unk_id_);
    } else {
      throw DomainError("alphabet: character '" + cp + "' not in alphabet");
    }
  }
  return ids;
}

std::string Alphabet::Decode(const std::vector<TokenId>& ids) const {
  std::string out;
  for (TokenId id : ids) out += token(id);
  return out;
}

std::uint64_t Alphabet::Fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& t : tokens_) {
    for (unsigned char c : t) mix(c);
    mix(0);
  }
  for (TokenId id : {blank_id_, bos_id_, eos_id_, unk_id_.value_or(-1)}) {
    for (int b = 0; b < 4; ++b) mix(static_cast<unsigned char>(static_cast<std::uint32_t>(id) >> (8 * b)));
  }
  return h;
}

bool Alphabet::operator==(const Alphabet& other) const {
  return tokens_ == other.tokens_ && blank_id_ == other.blank_id_ &&
         bos_id_ == other.bos_id_ && eos_id_ == other.eos_id_ &&
         unk_id_ == other.unk_id_;
}

}  // namespace ctcdec
