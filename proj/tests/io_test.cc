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

#include "attnseg/io.h"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "attnseg/error.h"
#include "test_util.h"

namespace attnseg {
namespace {

using testing::ExpectErrorCode;
using testing::RandomMap;

std::string U32(std::uint32_t v) {
  std::string s(4, '\0');
  for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  return s;
}

std::string F32(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  return U32(bits);
}

std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("attnseg_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(AtnbTest, HandBuiltHeader) {
  std::string bytes(kAtnbMagic);
  bytes += U32(2) + "u1" + U32(1) + U32(2);
  bytes += static_cast<char>(1);  // phone-frame
  bytes += static_cast<char>(3);  // word
  bytes += F32(10.0f) + F32(1.0f) + F32(1.0f);
  const auto maps = DecodeAtnb(bytes);
  ASSERT_EQ(maps.size(), 1u);
  EXPECT_EQ(maps[0].utterance_id(), "u1");
  EXPECT_EQ(maps[0].input_unit(), Unit::kPhoneFrame);
  EXPECT_EQ(maps[0].output_unit(), Unit::kWord);
  EXPECT_EQ(maps[0].frame_shift_ms(), 10.0);
  EXPECT_EQ(EncodeAtnb(maps), bytes);
}

TEST(AtnbTest, BadMagic) {
  ExpectErrorCode(ErrorCode::kBadMagic, [] { DecodeAtnb("XXXX"); });
  ExpectErrorCode(ErrorCode::kBadMagic, [] { DecodeAtnb(""); });
}

TEST(AtnbTest, TruncatedPayload) {
  std::string bytes(kAtnbMagic);
  bytes += U32(1) + "u" + U32(3) + U32(2);
  bytes += static_cast<char>(2);
  bytes += static_cast<char>(3);
  bytes += F32(0.0f);
  for (int i = 0; i < 5; ++i) bytes += F32(0.5f);
  ExpectErrorCode(ErrorCode::kTruncatedPayload, [&] { DecodeAtnb(bytes); });
  ExpectErrorCode(ErrorCode::kTruncatedPayload,
                  [&] { DecodeAtnb(std::string(kAtnbMagic) + U32(9) + "abc"); });
}

TEST(AtnbTest, ZeroDimensionAndBadUnit) {
  std::string zero(kAtnbMagic);
  zero += U32(1) + "u" + U32(0) + U32(2) + '\x02' + '\x03' + F32(0.0f);
  ExpectErrorCode(ErrorCode::kDimensionMismatch, [&] { DecodeAtnb(zero); });
  std::string bad_unit(kAtnbMagic);
  bad_unit += U32(1) + "u" + U32(1) + U32(1) + '\x09' + '\x03' + F32(0.0f) + F32(1.0f);
  ExpectErrorCode(ErrorCode::kParseError, [&] { DecodeAtnb(bad_unit); });
}

TEST(AtnbTest, EmptyContainer) {
  EXPECT_TRUE(DecodeAtnb(kAtnbMagic).empty());
}

TEST(AtnbPropertyTest, ByteIdenticalRoundTrip) {
  Rng rng(100);
  const Unit units[] = {Unit::kAcousticFrame, Unit::kPhoneFrame, Unit::kPhone, Unit::kWord};
  const auto dir = TempDir("atnb");
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AttentionMap> maps;
    const auto n = rng.UniformInt(1, 4);
    for (std::int64_t i = 0; i < n; ++i) {
      const Unit in = units[rng.UniformInt(0, 3)];
      const Unit out = units[rng.UniformInt(0, 3)];
      maps.push_back(RandomMap(rng, static_cast<std::size_t>(rng.UniformInt(1, 30)),
                               static_cast<std::size_t>(rng.UniformInt(1, 10)), in, out,
                               "utt-" + std::to_string(trial) + "-" + std::to_string(i)));
    }
    const std::string bytes = EncodeAtnb(maps);
    const auto decoded = DecodeAtnb(bytes);
    ASSERT_EQ(decoded.size(), maps.size());
    for (std::size_t i = 0; i < maps.size(); ++i) {
      EXPECT_EQ(decoded[i].utterance_id(), maps[i].utterance_id());
      EXPECT_EQ(decoded[i].rows(), maps[i].rows());
      EXPECT_EQ(decoded[i].input_unit(), maps[i].input_unit());
      for (std::size_t w = 0; w < maps[i].weights().size(); ++w) {
        ASSERT_EQ(decoded[i].weights()[w], static_cast<float>(maps[i].weights()[w]));
      }
    }
    ASSERT_EQ(EncodeAtnb(decoded), bytes) << "trial " << trial;
    const auto path = dir / "maps.atnb";
    WriteAttention(path, decoded);
    ASSERT_EQ(ReadFile(path), bytes);
    ASSERT_EQ(ReadAttention(path), decoded);
  }
}

TEST(AttentionTsvTest, ParsesFixture) {
  const std::string text =
      "# utt=a input=phone output=word\n"
      "0.5 0\n"
      "0.5 1\n"
      "\n"
      "# utt=b input=phone-frame output=word frame_shift_ms=25\n"
      "1\n";
  const auto maps = DecodeAttentionTsv(text);
  ASSERT_EQ(maps.size(), 2u);
  EXPECT_EQ(maps[0].rows(), 2u);
  EXPECT_EQ(maps[0].cols(), 2u);
  EXPECT_EQ(maps[0].at(1, 1), 1.0);
  EXPECT_EQ(maps[1].frame_shift_ms(), 25.0);
  EXPECT_EQ(DecodeAttentionTsv(EncodeAttentionTsv(maps)), maps);
}

TEST(AttentionTsvTest, RaggedRowsAreRejected) {
  ExpectErrorCode(ErrorCode::kDimensionMismatch, [] {
    DecodeAttentionTsv("# utt=a input=phone output=word\n0.5 0.5\n0.5\n");
  });
}

TEST(AlignmentTest, ParsesExample) {
  const auto segs = DecodeAlignments(
      "# unit=phone\n"
      "u1\t1\t2\tab\n"
      "u1\t3\t3\tc\n"
      "u2\t1\t4\tabcd\n");
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].utterance_id, "u1");
  EXPECT_EQ(segs[0].horizon, 3);
  EXPECT_EQ(segs[0].segments[1], (Segment{3, 3, "c"}));
  EXPECT_EQ(segs[1].horizon, 4);
  EXPECT_EQ(segs[0].unit, Unit::kPhone);
}

TEST(AlignmentTest, GapIsInvariantViolationNamingUtterance) {
  try {
    DecodeAlignments("# unit=phone\nbad_utt\t1\t2\tab\nbad_utt\t4\t5\tc\n");
    FAIL() << "expected InvariantViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvariantViolation);
    EXPECT_NE(std::string(e.what()).find("bad_utt"), std::string::npos);
  }
}

TEST(AlignmentTest, EmptyFileIsEmpty) {
  EXPECT_TRUE(DecodeAlignments("").empty());
  EXPECT_TRUE(DecodeAlignments("# unit=phone\n").empty());
}

TEST(AlignmentTest, ParseErrorsCarryLineNumbers) {
  try {
    DecodeAlignments("# unit=phone\nu\t1\t2\tab\nu\tx\t3\tc\n");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  ExpectErrorCode(ErrorCode::kParseError,
                  [] { DecodeAlignments("# unit=phone\nu\t1\t2\n"); });
  ExpectErrorCode(ErrorCode::kParseError, [] {
    DecodeAlignments("# unit=phone\na\t1\t1\tx\nb\t1\t1\ty\na\t2\t2\tz\n");
  });
}

TEST(AlignmentPropertyTest, ByteIdenticalRoundTrip) {
  Rng rng(200);
  const auto dir = TempDir("align");
  for (int trial = 0; trial < 100; ++trial) {
    const bool frames = rng.UniformInt(0, 1) == 1;
    const Unit unit = frames ? Unit::kPhoneFrame : Unit::kPhone;
    std::optional<double> shift;
    if (frames) shift = rng.UniformInt(0, 1) ? 10.0 : 12.5;
    std::vector<Segmentation> segs;
    const auto n = rng.UniformInt(1, 6);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t T = rng.UniformInt(1, 90);
      const std::int64_t K = rng.UniformInt(1, std::min<std::int64_t>(T, 12));
      Segmentation s = RandomSegmentation(
          rng, "t" + std::to_string(trial) + "_" + std::to_string(i), T, K, unit, shift);
      for (Segment& seg : s.segments) {
        std::string label;
        for (std::int64_t c = rng.UniformInt(1, 6); c > 0; --c) {
          label.push_back(static_cast<char>('a' + rng.UniformInt(0, 25)));
        }
        seg.label = label;
      }
      segs.push_back(std::move(s));
    }
    const std::string text = EncodeAlignments(segs);
    const auto decoded = DecodeAlignments(text);
    ASSERT_EQ(decoded, segs) << "trial " << trial;
    ASSERT_EQ(EncodeAlignments(decoded), text) << "trial " << trial;
    const auto path = dir / "ref.tsv";
    WriteAlignments(path, segs);
    ASSERT_EQ(ReadFile(path), text);
  }
}

TEST(BoundaryTsvTest, RoundTrip) {
  const std::vector<BoundarySet> sets{
      {"a", {3, 7}, 10, BoundaryUnit::kTemporalFrame, 10.0},
      {"b", {}, 4, BoundaryUnit::kTemporalFrame, 10.0}};
  const std::string text = EncodeBoundaries(sets);
  EXPECT_EQ(text,
            "# boundaries unit=temporal-frame frame_shift_ms=10\n"
            "a\t10\t3 7\n"
            "b\t4\t\n");
  EXPECT_EQ(DecodeBoundaries(text), sets);
  const std::vector<BoundarySet> sym{{"c", {1}, 2, BoundaryUnit::kSymbolic, {}}};
  EXPECT_EQ(DecodeBoundaries(EncodeBoundaries(sym)), sym);
}

TEST(BoundaryTsvTest, OutOfRangePositionIsRejected) {
  ExpectErrorCode(ErrorCode::kInvariantViolation, [] {
    DecodeBoundaries("# boundaries unit=symbolic\na\t4\t4\n");
  });
}

TEST(FeaturesTest, RoundTrip) {
  std::vector<FeatureMatrix> feats{{"a", 2, 3, {1, 2, 3, 4, 5, 6}}, {"b", 1, 1, {-0.5f}}};
  const std::string bytes = EncodeFeatures(feats);
  EXPECT_EQ(bytes.substr(0, 6), kAtnfMagic);
  EXPECT_EQ(DecodeFeatures(bytes), feats);
  ExpectErrorCode(ErrorCode::kBadMagic, [] { DecodeFeatures("ATNB1\n"); });
  ExpectErrorCode(ErrorCode::kTruncatedPayload,
                  [&] { DecodeFeatures(bytes.substr(0, bytes.size() - 1)); });
}

TEST(HeatmapTest, PgmHeader) {
  const AttentionMap m = AttentionMap::FromRows("u", {{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}},
                                                Unit::kPhone, Unit::kWord);
  const std::string pgm = EncodeHeatmapPgm(m);
  const std::string header = "P5\n2 3\n255\n";
  ASSERT_EQ(pgm.substr(0, header.size()), header);
  EXPECT_EQ(pgm.size(), header.size() + 6);
  EXPECT_EQ(static_cast<unsigned char>(pgm[header.size()]), 0);
  EXPECT_EQ(static_cast<unsigned char>(pgm[header.size() + 1]), 255);
}

TEST(FormatNumberTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatNumber(10.0), "10");
  EXPECT_EQ(FormatNumber(12.5), "12.5");
  EXPECT_EQ(FormatNumber(0.1), "0.1");
}

TEST(FilesTest, MissingFileIsIoError) {
  ExpectErrorCode(ErrorCode::kIoError, [] { ReadFile("/nonexistent/attnseg/file"); });
}

}  // namespace
}  // namespace attnseg
