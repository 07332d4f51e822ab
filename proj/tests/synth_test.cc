// Copyright 2026 The attnseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attnseg/synth.h"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "attnseg/error.h"
#include "attnseg/io.h"
#include "attnseg/postprocess.h"
#include "test_util.h"

namespace attnseg {
namespace {

using testing::ExpectErrorCode;

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(17);
  Rng b(17);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.UniformInt(-3, 9), b.UniformInt(-3, 9));
    ASSERT_EQ(a.Normal(), b.Normal());
  }
}

TEST(RngTest, UniformIntCoversRange) {
  Rng rng(5);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t v = rng.UniformInt(2, 6);
    ASSERT_GE(v, 2);
    ASSERT_LE(v, 6);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(SynthAttentionTest, ProducesValidMaps) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t T = rng.UniformInt(1, 80);
    const std::int64_t K = rng.UniformInt(1, std::min<std::int64_t>(T, 10));
    const Segmentation ref = RandomSegmentation(rng, "u", T, K, Unit::kPhone);
    const AttentionMap m =
        SynthAttention(ref, {rng.Uniform() * 0.99 + 0.01, 0.1, rng.Next()});
    EXPECT_EQ(m.rows(), static_cast<std::size_t>(T));
    EXPECT_EQ(m.cols(), static_cast<std::size_t>(K));
    EXPECT_NO_THROW(ValidateMap(m));
  }
}

TEST(SynthAttentionTest, SingleSegmentIsUniform) {
  const Segmentation ref{"u", {{1, 4, "w"}}, 4, Unit::kPhone, {}};
  const AttentionMap m = SynthAttention(ref, {0.8, 0.0, 0});
  for (std::size_t t = 0; t < 4; ++t) EXPECT_DOUBLE_EQ(m.at(t, 0), 0.25);
}

TEST(SynthAttentionTest, NoiseFreeLayout) {
  const Segmentation ref{"u", {{1, 2, "a"}, {3, 5, "b"}}, 5, Unit::kPhone, {}};
  const AttentionMap m = SynthAttention(ref, {0.8, 0.0, 0});
  EXPECT_DOUBLE_EQ(m.at(0, 0), 0.4);
  EXPECT_DOUBLE_EQ(m.at(2, 0), 0.2 / 3.0);
  EXPECT_DOUBLE_EQ(m.at(2, 1), 0.8 / 3.0);
  EXPECT_DOUBLE_EQ(m.at(1, 1), 0.1);
}

TEST(SynthAttentionTest, NoiseFreeRecoveryUnderSegmentalDecoding) {
  // With peak mass above len / T for every segment, the in-segment weight
  // beats every out-of-segment weight, so decoding recovers the reference.
  Rng rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t T = rng.UniformInt(2, 60);
    const std::int64_t K = rng.UniformInt(1, std::min<std::int64_t>(T, 8));
    const Segmentation ref = RandomSegmentation(rng, "u", T, K, Unit::kPhone);
    std::int64_t longest = 0;
    for (const Segment& s : ref.segments) longest = std::max(longest, s.length());
    const double peak = std::min(1.0, static_cast<double>(longest) / T + 0.05);
    const AttentionMap m = SynthAttention(ref, {peak, 0.0, 0});
    const SegmentalResult r = SegmentalAssign(m, {});
    EXPECT_EQ(BoundariesFromSegmentation(r.segmentation).positions,
              BoundariesFromSegmentation(ref).positions)
        << "trial " << trial;
  }
}

TEST(SynthAttentionTest, SeedDeterminesNoise) {
  const Segmentation ref{"u", {{1, 3, "a"}, {4, 9, "b"}}, 9, Unit::kPhone, {}};
  EXPECT_EQ(SynthAttention(ref, {0.8, 0.05, 3}), SynthAttention(ref, {0.8, 0.05, 3}));
  EXPECT_FALSE(SynthAttention(ref, {0.8, 0.05, 3}) == SynthAttention(ref, {0.8, 0.05, 4}));
}

TEST(RandomSegmentationsTest, RespectsRanges) {
  RandomCorpusConfig cfg;
  cfg.seed = 3;
  const auto segs = RandomSegmentations(cfg);
  ASSERT_EQ(segs.size(), 200u);
  for (const Segmentation& s : segs) {
    EXPECT_GE(s.horizon, 50);
    EXPECT_LE(s.horizon, 70);
    EXPECT_GE(s.segments.size(), 6u);
    EXPECT_LE(s.segments.size(), 10u);
    EXPECT_EQ(s.unit, Unit::kPhoneFrame);
    EXPECT_NO_THROW(ValidateSegmentation(s));
  }
}

TEST(PronunciationCapacityTest, Counts) {
  // 3 phones, length 2, no immediate repeat: 3 * 2.
  EXPECT_EQ(PronunciationCapacity(3, {2, 2}), 6);
  EXPECT_EQ(PronunciationCapacity(3, {1, 2}), 9);
  EXPECT_EQ(PronunciationCapacity(1, {2, 5}), 0);
}

TEST(SynthesizeCorpusTest, InfeasibleConfigs) {
  LexiconConfig cfg;
  cfg.phone_inventory_size = 2;
  cfg.word_len = {1, 1};
  cfg.n_word_types = 5;
  ExpectErrorCode(ErrorCode::kConfigInfeasible, [&] { SynthesizeCorpus(cfg); });
  LexiconConfig empty_range;
  empty_range.frames_per_phone = {5, 3};
  ExpectErrorCode(ErrorCode::kConfigInfeasible, [&] { SynthesizeCorpus(empty_range); });
}

TEST(SynthesizeCorpusTest, StructuralInvariants) {
  LexiconConfig cfg;
  cfg.seed = 1;
  const SynthCorpus corpus = SynthesizeCorpus(cfg);
  ASSERT_EQ(corpus.utterances.size(), 500u);
  ASSERT_EQ(corpus.lexicon.size(), 50u);
  EXPECT_EQ(corpus.phone_inventory.size(), 20u);

  std::map<std::string, std::vector<std::string>> pron;
  std::set<std::vector<std::string>> distinct;
  for (const LexiconEntry& e : corpus.lexicon) {
    pron[e.word] = e.phones;
    distinct.insert(e.phones);
    EXPECT_GE(e.phones.size(), 2u);
    EXPECT_LE(e.phones.size(), 5u);
  }
  EXPECT_EQ(distinct.size(), 50u);

  for (const SynthUtterance& u : corpus.utterances) {
    EXPECT_GE(u.words.size(), 4u);
    EXPECT_LE(u.words.size(), 8u);
    std::vector<std::string> expanded;
    for (const std::string& w : u.words) {
      ASSERT_TRUE(pron.count(w)) << w;
      expanded.insert(expanded.end(), pron[w].begin(), pron[w].end());
    }
    EXPECT_EQ(u.phones, expanded);
    ASSERT_EQ(u.phone_durations.size(), u.phones.size());
    std::vector<std::string> frames;
    for (std::size_t i = 0; i < u.phones.size(); ++i) {
      EXPECT_GE(u.phone_durations[i], 3);
      EXPECT_LE(u.phone_durations[i], 9);
      frames.insert(frames.end(), static_cast<std::size_t>(u.phone_durations[i]),
                    u.phones[i]);
    }
    EXPECT_EQ(u.phone_frames, frames);

    ASSERT_NO_THROW(ValidateSegmentation(u.phone_reference));
    ASSERT_NO_THROW(ValidateSegmentation(u.frame_reference));
    ASSERT_EQ(u.phone_reference.segments.size(), u.words.size());
    EXPECT_EQ(u.phone_reference.horizon, static_cast<std::int64_t>(u.phones.size()));
    EXPECT_EQ(u.frame_reference.horizon, static_cast<std::int64_t>(frames.size()));
    for (std::size_t k = 0; k < u.words.size(); ++k) {
      EXPECT_EQ(u.phone_reference.segments[k].label, u.words[k]);
      EXPECT_EQ(u.phone_reference.segments[k].length(),
                static_cast<std::int64_t>(pron[u.words[k]].size()));
    }
    EXPECT_NO_THROW(ValidateCorpusItem(PhoneToWordItem(u)));
    EXPECT_NO_THROW(ValidateCorpusItem(FrameToWordItem(u)));
    EXPECT_FALSE(WordToPhoneItem(u).reference);
  }
}

TEST(SynthesizeCorpusTest, TwoWordExpansion) {
  // Two words over three phones, each phone lasting two frames.
  LexiconConfig cfg;
  cfg.n_word_types = 2;
  cfg.phone_inventory_size = 3;
  cfg.word_len = {1, 2};
  cfg.utterance_len = {2, 2};
  cfg.frames_per_phone = {2, 2};
  cfg.n_utterances = 20;
  cfg.seed = 5;
  const SynthCorpus corpus = SynthesizeCorpus(cfg);
  for (const SynthUtterance& u : corpus.utterances) {
    const auto& pr = u.phone_reference.segments;
    const auto& fr = u.frame_reference.segments;
    ASSERT_EQ(fr.size(), 2u);
    EXPECT_EQ(fr[0], (Segment{1, 2 * pr[0].end, pr[0].label}));
    EXPECT_EQ(fr[1], (Segment{2 * pr[0].end + 1, 2 * pr[1].end, pr[1].label}));
  }
}

TEST(SynthesizeCorpusTest, EmittedStatisticsMatchConfig) {
  LexiconConfig cfg;
  cfg.seed = 2;
  const SynthCorpus corpus = SynthesizeCorpus(cfg);
  // Recount from the serialized files, not the in-memory structs.
  const auto lex_lines = SplitOn(EncodeLexicon(corpus), '\n');
  std::map<std::string, std::size_t> word_len;
  double lex_phones = 0;
  for (std::size_t i = 1; i < lex_lines.size(); ++i) {
    const auto f = SplitOn(lex_lines[i], '\t');
    ASSERT_EQ(f.size(), 2u);
    word_len[f[0]] = SplitOn(f[1], ' ').size();
    lex_phones += static_cast<double>(word_len[f[0]]);
  }
  ASSERT_EQ(word_len.size(), 50u);
  const double lex_mean = lex_phones / 50.0;

  const auto lines = SplitOn(EncodeCorpus(corpus), '\n');
  ASSERT_EQ(lines.size(), 501u);
  double n_words = 0, n_phones = 0, n_frames = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = SplitOn(lines[i], '\t');
    ASSERT_EQ(f.size(), 4u);
    n_words += static_cast<double>(SplitOn(f[1], ' ').size());
    n_phones += static_cast<double>(SplitOn(f[2], ' ').size());
    for (const std::string& d : SplitOn(f[3], ' ')) n_frames += std::stod(d);
  }
  EXPECT_NEAR(n_words / 500.0, 6.0, 0.05 * 6.0);
  EXPECT_NEAR(n_phones / n_words, lex_mean, 0.05 * lex_mean);
  EXPECT_NEAR(lex_mean, 3.5, 0.1 * 3.5);
  EXPECT_NEAR(n_frames / n_phones, 6.0, 0.05 * 6.0);
}

TEST(SynthesizeCorpusTest, ReproducibleBytes) {
  LexiconConfig cfg;
  cfg.seed = 7;
  const SynthCorpus a = SynthesizeCorpus(cfg);
  const SynthCorpus b = SynthesizeCorpus(cfg);
  EXPECT_EQ(EncodeCorpus(a), EncodeCorpus(b));
  EXPECT_EQ(EncodeLexicon(a), EncodeLexicon(b));
  cfg.seed = 8;
  EXPECT_NE(EncodeCorpus(a), EncodeCorpus(SynthesizeCorpus(cfg)));
}

TEST(SynthesizeAcousticsTest, ShapesFollowFrames) {
  LexiconConfig cfg;
  cfg.n_utterances = 10;
  const SynthCorpus corpus = SynthesizeCorpus(cfg);
  const auto feats = SynthesizeAcoustics(corpus, {8, 1.0, 0.5, 3});
  ASSERT_EQ(feats.size(), 10u);
  for (std::size_t i = 0; i < feats.size(); ++i) {
    EXPECT_EQ(feats[i].utterance_id, corpus.utterances[i].utterance_id);
    EXPECT_EQ(feats[i].rows, corpus.utterances[i].phone_frames.size());
    EXPECT_EQ(feats[i].dims, 8u);
    EXPECT_EQ(feats[i].values.size(), feats[i].rows * 8);
  }
  EXPECT_EQ(SynthesizeAcoustics(corpus, {8, 1.0, 0.5, 3}), feats);
}

}  // namespace
}  // namespace attnseg
