// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctcdec {

using TokenId = std::int32_t;

/// Ordered token inventory shared by lattices, language models and transcripts.
///
/// Ids are dense in [0, size()). The blank, sentence-begin and sentence-end
/// markers are mandatory and pairwise distinct; an unknown-token marker is
/// optional. Space is an ordinary token.
class Alphabet {
 public:
  Alphabet(std::vector<std::string> tokens, TokenId blank_id, TokenId bos_id,
           TokenId eos_id, std::optional<TokenId> unk_id = std::nullopt);

  /// blank, <s>, </s>, <unk>, then one token per UTF-8 code point of `chars`.
  static Alphabet FromCharacters(std::string_view chars, bool with_unk = true);

  /// Reads the one-token-per-line format with `#blank`, `#bos`, `#eos` and
  /// `#unk` directive rows. A line holding a single space is the space token.
  static Alphabet Read(std::istream& in);
  static Alphabet Load(const std::string& path);
  void Write(std::ostream& out) const;

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> Find(std::string_view token) const;

  TokenId blank_id() const { return blank_id_; }
  TokenId bos_id() const { return bos_id_; }
  TokenId eos_id() const { return eos_id_; }
  std::optional<TokenId> unk_id() const { return unk_id_; }

  bool Valid(TokenId id) const { return id >= 0 && static_cast<std::size_t>(id) < tokens_.size(); }
  bool IsBlank(TokenId id) const { return id == blank_id_; }
  /// Labels a CTC path may emit: everything except blank, <s> and </s>.
  bool IsEmittable(TokenId id) const;
  /// Ordinary text tokens: not blank, not any marker.
  bool IsLexical(TokenId id) const;
  std::vector<TokenId> LexicalIds() const;

  /// Splits UTF-8 text into code points and maps each to a token id. Unknown
  /// characters map to <unk>, or throw DomainError when there is no <unk>.
  std::vector<TokenId> Encode(std::string_view text) const;
  std::string Decode(const std::vector<TokenId>& ids) const;

  /// FNV-1a over the token strings and marker ids; stamped into model files.
  std::uint64_t Fingerprint() const;

  bool operator==(const Alphabet& other) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId blank_id_;
  TokenId bos_id_;
  TokenId eos_id_;
  std::optional<TokenId> unk_id_;
};

/// Splits a UTF-8 string into code-point substrings. Invalid lead bytes are
/// passed through as single bytes.
std::vector<std::string> SplitCodePoints(std::string_view text);

}  // namespace ctcdec
