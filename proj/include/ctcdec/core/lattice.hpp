// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ctcdec {

/// Per-frame natural-log posteriors over every alphabet token, blank included.
///
/// Rows are validated on construction: entries must be <= 0 and each row's
/// log-sum-exp must be 0 within kRowTolerance.
class PosteriorLattice {
 public:
  static constexpr double kRowTolerance = 1e-6;

  PosteriorLattice(std::size_t num_frames, std::size_t num_tokens,
                   std::vector<double> log_probs);

  /// Row-wise log-softmax of arbitrary scores.
  static PosteriorLattice FromLogits(std::size_t num_frames, std::size_t num_tokens,
                                     std::span<const double> logits);

  std::size_t num_frames() const { return num_frames_; }
  std::size_t num_tokens() const { return num_tokens_; }
  std::span<const double> frame(std::size_t t) const {
    return {data_.data() + t * num_tokens_, num_tokens_};
  }
  double at(std::size_t t, std::size_t token) const { return data_[t * num_tokens_ + token]; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const PosteriorLattice&) const = default;

 private:
  std::size_t num_frames_;
  std::size_t num_tokens_;
  std::vector<double> data_;
};

// Text format: "CTCLAT1 <T> <Vblank>" then T rows of Vblank log-probs.
// Values are written with 17 significant digits so a text round trip is exact.
PosteriorLattice ReadLatticeText(std::istream& in);
void WriteLatticeText(std::ostream& out, const PosteriorLattice& lattice);

// Binary format: 8-byte magic "CTCLATB1", little-endian uint32 T and Vblank,
// then T*Vblank little-endian float32 values, row-major.
PosteriorLattice ReadLatticeBinary(std::istream& in);
void WriteLatticeBinary(std::ostream& out, const PosteriorLattice& lattice);

/// Sniffs the magic and dispatches to the text or binary reader.
PosteriorLattice LoadLattice(const std::string& path);
void SaveLattice(const std::string& path, const PosteriorLattice& lattice, bool binary);

}  // namespace ctcdec
