// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/core/lattice.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ctcdec/error.hpp"
#include "ctcdec/log_math.hpp"

namespace ctcdec {

namespace {

constexpr std::string_view kTextMagic = "CTCLAT1";
constexpr std::string_view kBinaryMagic = "CTCLATB1";

static_assert(std::endian::native == std::endian::little,
              "binary lattice I/O assumes a little-endian host");

void PutU32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), 4);
}

std::uint32_t GetU32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw IoError("lattice: truncated binary header");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double ParseValue(const std::string& s) {
  if (s == "-inf" || s == "-Inf" || s == "-INF") return kLogZero;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw IoError("lattice: bad value '" + s + "'");
  }
  if (used != s.size()) throw IoError("lattice: bad value '" + s + "'");
  return v;
}

}  // namespace

PosteriorLattice::PosteriorLattice(std::size_t num_frames, std::size_t num_tokens,
                                   std::vector<double> log_probs)
    : num_frames_(num_frames), num_tokens_(num_tokens), data_(std::move(log_probs)) {
  if (num_frames_ == 0) throw DomainError("lattice: need at least one frame");
  if (num_tokens_ < 2) throw DomainError("lattice: need blank plus at least one label");
  if (data_.size() != num_frames_ * num_tokens_) {
    throw DomainError("lattice: data size does not match T x Vblank");
  }
  for (std::size_t t = 0; t < num_frames_; ++t) {
    auto row = frame(t);
    for (double v : row) {
      if (std::isnan(v) || v > 0.0) {
        throw DomainError("lattice: frame " + std::to_string(t) + " has a positive or NaN entry");
      }
    }
    if (std::abs(LogSumExp(row)) > kRowTolerance) {
      throw DomainError("lattice: frame " + std::to_string(t) + " is not normalized");
    }
  }
}

PosteriorLattice PosteriorLattice::FromLogits(std::size_t num_frames, std::size_t num_tokens,
                                              std::span<const double> logits) {
  if (logits.size() != num_frames * num_tokens) {
    throw DomainError("lattice: logits size does not match T x Vblank");
  }
  std::vector<double> data(logits.begin(), logits.end());
  for (std::size_t t = 0; t < num_frames; ++t) {
    std::span<double> row(data.data() + t * num_tokens, num_tokens);
    double z = LogSumExp(row);
    for (double& v : row) v = std::min(0.0, v - z);
  }
  return PosteriorLattice(num_frames, num_tokens, std::move(data));
}

PosteriorLattice ReadLatticeText(std::istream& in) {
  std::string magic;
  std::size_t frames = 0, tokens = 0;
  if (!(in >> magic) || magic != kTextMagic) throw IoError("lattice: missing CTCLAT1 header");
  if (!(in >> frames >> tokens)) throw IoError("lattice: bad CTCLAT1 header");
  std::vector<double> data;
  data.reserve(frames * tokens);
  std::string cell;
  for (std::size_t i = 0; i < frames * tokens; ++i) {
    if (!(in >> cell)) throw IoError("lattice: truncated CTCLAT1 body");
    data.push_back(ParseValue(cell));
  }
  try {
    return PosteriorLattice(frames, tokens, std::move(data));
  } catch (const DomainError& e) {
    throw IoError(e.what());
  }
}

void WriteLatticeText(std::ostream& out, const PosteriorLattice& lattice) {
  out << kTextMagic << ' ' << lattice.num_frames() << ' ' << lattice.num_tokens() << '\n';
  std::ostringstream row;
  row << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t t = 0; t < lattice.num_frames(); ++t) {
    row.str({});
    auto values = lattice.frame(t);
    for (std::size_t v = 0; v < values.size(); ++v) {
      if (v) row << ' ';
      if (values[v] == kLogZero) {
        row << "-inf";
      } else {
        row << values[v];
      }
    }
    out << row.str() << '\n';
  }
}

PosteriorLattice ReadLatticeBinary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), 8) || std::string_view(magic.data(), 8) != kBinaryMagic) {
    throw IoError("lattice: missing CTCLATB1 header");
  }
  std::uint32_t frames = GetU32(in);
  std::uint32_t tokens = GetU32(in);
  std::vector<float> raw(static_cast<std::size_t>(frames) * tokens);
  if (!in.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size() * sizeof(float)))) {
    throw IoError("lattice: truncated CTCLATB1 body");
  }
  std::vector<double> data(raw.begin(), raw.end());
  try {
    return PosteriorLattice(frames, tokens, std::move(data));
  } catch (const DomainError& e) {
    throw IoError(e.what());
  }
}

void WriteLatticeBinary(std::ostream& out, const PosteriorLattice& lattice) {
  out.write(kBinaryMagic.data(), 8);
  PutU32(out, static_cast<std::uint32_t>(lattice.num_frames()));
  PutU32(out, static_cast<std::uint32_t>(lattice.num_tokens()));
  std::vector<float> raw(lattice.data().begin(), lattice.data().end());
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
}

PosteriorLattice LoadLattice(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lattice " + path);
  std::array<char, 8> head{};
  in.read(head.data(), 8);
  in.clear();
  in.seekg(0);
  if (std::string_view(head.data(), 8) == kBinaryMagic) return ReadLatticeBinary(in);
  return ReadLatticeText(in);
}

void SaveLattice(const std::string& path, const PosteriorLattice& lattice, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write lattice " + path);
  if (binary) {
    WriteLatticeBinary(out, lattice);
  } else {
    WriteLatticeText(out, lattice);
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace ctcdec
