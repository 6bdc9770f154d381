// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "ctcdec/augment/noise.hpp"
#include "ctcdec/error.hpp"
#include "ctcdec/lm/ngram.hpp"
#include "support.hpp"

namespace ctcdec {
namespace {

using testing::LetterAlphabet;
using testing::RandomCorpus;
using testing::RandomTranscript;

Transcript T(const Alphabet& a, const std::string& s) { return Transcript{a.Encode(s)}; }
TokenId Id(const Alphabet& a, char c) { return *a.Find(std::string(1, c)); }

TEST(InjectNoise, ZeroEpsilonIsIdentity) {
  auto a = LetterAlphabet(4);
  Rng rng(1);
  NoiseSpec spec;
  spec.epsilon = 0.0;
  const auto clean = RandomTranscript(*a, 30, 30, rng);
  const auto noisy = InjectNoise(clean, spec, *a, rng);
  EXPECT_EQ(noisy.noisy, clean);
  EXPECT_TRUE(noisy.edits.empty());
}

TEST(InjectNoise, FullSubstitution) {
  auto a = LetterAlphabet(4);
  Rng rng(2);
  NoiseSpec spec;
  spec.epsilon = 1.0;
  spec.mix = {0.0, 0.0, 1.0};
  const auto clean = RandomTranscript(*a, 50, 50, rng);
  const auto noisy = InjectNoise(clean, spec, *a, rng);
  ASSERT_EQ(noisy.noisy.size(), clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    EXPECT_NE(noisy.noisy.labels[i], clean.labels[i]);
    EXPECT_TRUE(a->IsLexical(noisy.noisy.labels[i]));
  }
}

TEST(InjectNoise, NeedsTwoLexicalTokens) {
  auto a = LetterAlphabet(1);
  Rng rng(3);
  EXPECT_THROW(InjectNoise(T(*a, "aaa"), NoiseSpec{}, *a, rng), DomainError);
}

TEST(InjectNoise, RejectsBadSpec) {
  NoiseSpec spec;
  spec.mix = {0.5, 0.5, 0.5};
  EXPECT_THROW(spec.Validate(), DomainError);
  spec = NoiseSpec{};
  spec.epsilon = 1.5;
  EXPECT_THROW(spec.Validate(), DomainError);
  spec = NoiseSpec{};
  spec.mix = {-0.1, 0.6, 0.5};
  EXPECT_THROW(spec.Validate(), DomainError);
}

TEST(InjectNoise, ReplayReproducesNoisy) {
  auto a = LetterAlphabet(5);
  Rng rng(4);
  NoiseSpec spec;
  spec.epsilon = 0.3;
  for (int i = 0; i < 200; ++i) {
    const auto clean = RandomTranscript(*a, 0, 25, rng);
    const auto noisy = InjectNoise(clean, spec, *a, rng);
    EXPECT_EQ(ReplayEdits(clean, noisy.edits), noisy.noisy);
  }
}

TEST(InjectNoise, ExactCount) {
  auto a = LetterAlphabet(5);
  Rng rng(5);
  NoiseSpec spec;
  spec.epsilon = 0.2;
  spec.exact_count = true;
  const auto clean = RandomTranscript(*a, 40, 40, rng);
  EXPECT_EQ(InjectNoise(clean, spec, *a, rng).edits.size(), 8u);
}

TEST(InjectNoise, SeedDeterminism) {
  auto a = LetterAlphabet(5);
  Rng gen(6);
  const auto corpus = RandomCorpus(*a, 50, 10, 30, gen);
  NoiseSpec spec;
  spec.epsilon = 0.2;
  spec.seed = 9;
  const auto p1 = BuildBackwardCorpus(corpus, 1, spec, *a);
  const auto p2 = BuildBackwardCorpus(corpus, 1, spec, *a);
  spec.seed = 10;
  const auto p3 = BuildBackwardCorpus(corpus, 1, spec, *a);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(p1[i].noisy_future, p2[i].noisy_future);
    EXPECT_EQ(p1[i].alignment_map, p2[i].alignment_map);
    if (p1[i].noisy_future != p3[i].noisy_future) ++differing;
  }
  EXPECT_GT(differing, 25u);
  // A sentence's record does not depend on the rest of the corpus.
  spec.seed = 9;
  const auto solo = AugmentSentence(corpus[20], 20, 1, spec, *a);
  EXPECT_EQ(solo.noisy_future, p1[20].noisy_future);
}

TEST(InjectNoise, ExpectedLength) {
  auto a = LetterAlphabet(6);
  Rng rng(7);
  NoiseSpec spec;
  spec.epsilon = 0.2;
  std::size_t clean_total = 0, noisy_total = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto clean = RandomTranscript(*a, 50, 50, rng);
    clean_total += clean.size();
    noisy_total += InjectNoise(clean, spec, *a, rng).noisy.size();
  }
  const double expect = static_cast<double>(clean_total) * (1.0 + 0.2 * (0.45 - 0.20));
  EXPECT_NEAR(static_cast<double>(noisy_total), expect, 0.01 * expect);
}

TEST(AlignFuture, IdentityWithoutNoise) {
  for (std::size_t tau = 0; tau <= 3; ++tau) {
    const auto map = AlignFuture(6, {}, tau);
    for (std::size_t t = 0; t < 6; ++t) {
      if (t + 1 + tau <= 6) {
        EXPECT_EQ(map[t], t + 1 + tau);
      } else {
        EXPECT_EQ(map[t], kFutureEnd);
      }
    }
  }
}

TEST(AlignFuture, InsertionExample) {
  auto a = LetterAlphabet(24);
  const auto clean = T(*a, "abcd");
  const std::vector<NoiseEdit> edits{{1, EditOp::kInsertion, Id(*a, 'x')}};
  EXPECT_EQ(a->Decode(ReplayEdits(clean, edits).labels), "abxcd");
  const auto map = AlignFuture(4, edits, 0);
  EXPECT_EQ(map[0], 1u);  // "b"
  EXPECT_EQ(map[1], 3u);  // "c"
  EXPECT_EQ(map[2], 4u);  // "d"
  EXPECT_EQ(map[3], 5u);  // sentence end
}

TEST(AlignFuture, DeletionSkipsToSurvivor) {
  auto a = LetterAlphabet(4);
  const auto clean = T(*a, "abcd");
  const std::vector<NoiseEdit> edits{{2, EditOp::kDeletion, Id(*a, 'c')}};
  const auto noisy = ReplayEdits(clean, edits);
  EXPECT_EQ(a->Decode(noisy.labels), "abd");
  const auto map = AlignFuture(4, edits, 1);
  EXPECT_EQ(noisy.labels[map[0]], Id(*a, 'd'));
  EXPECT_EQ(map[1], 2u);
  EXPECT_EQ(map[2], 3u);  // end of the noisy stream
  EXPECT_EQ(map[3], kFutureEnd);
}

TEST(AlignFuture, MonotoneAndInBounds) {
  auto a = LetterAlphabet(5);
  Rng rng(8);
  NoiseSpec spec;
  spec.epsilon = 0.4;
  for (int i = 0; i < 300; ++i) {
    const auto clean = RandomTranscript(*a, 0, 20, rng);
    const auto noisy = InjectNoise(clean, spec, *a, rng);
    const auto map = AlignFuture(clean.size(), noisy.edits, rng.Below(3));
    for (std::size_t t = 0; t < map.size(); ++t) {
      if (map[t] == kFutureEnd) continue;
      EXPECT_LE(map[t], noisy.noisy.size());
      if (t > 0) EXPECT_LE(map[t - 1], map[t]);
    }
  }
}

TEST(AugmentedCorpus, TextRoundTrip) {
  auto a = LetterAlphabet(5);
  Rng rng(9);
  const auto corpus = RandomCorpus(*a, 20, 0, 15, rng);
  NoiseSpec spec;
  spec.epsilon = 0.3;
  const auto pairs = BuildBackwardCorpus(corpus, 2, spec, *a);
  std::stringstream ss;
  WriteAugmentedCorpus(ss, pairs, *a);
  const auto back = ReadAugmentedCorpus(ss, *a);
  ASSERT_EQ(back.size(), pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(back[i].target, pairs[i].target);
    EXPECT_EQ(back[i].noisy_future, pairs[i].noisy_future);
    EXPECT_EQ(back[i].alignment_map, pairs[i].alignment_map);
  }
}

TEST(AugmentedCorpus, CleanRecordsTrainTheShiftedModel) {
  auto a = LetterAlphabet(4);
  Rng rng(10);
  const auto corpus = RandomCorpus(*a, 40, 1, 12, rng);
  NoiseSpec spec;
  spec.epsilon = 0.0;
  for (std::size_t tau = 0; tau <= 2; ++tau) {
    const auto pairs = BuildBackwardCorpus(corpus, tau, spec, *a);
    const auto from_pairs = TrainBackwardNGram(pairs, a, 3, tau, 0.0);
    const auto direct = TrainNGram(corpus, a, 3, Direction::kBackward, tau);
    std::stringstream s1, s2;
    NGramLM copy(direct);
    copy.set_noise_epsilon(0.0);
    copy.Write(s1);
    from_pairs.Write(s2);
    EXPECT_EQ(s1.str(), s2.str());
  }
}

}  // namespace
}  // namespace ctcdec
